use proptest::prelude::*;

use loctime_core::linalg::Square;
use loctime_core::model::{center_observable, stationarity_residual};
use loctime_core::montecarlo::{local_time_field, local_time_on, mass_grid, Sampler};
use loctime_core::spectral::{brute_force_charfn, charfn_power, eigen_at};
use loctime_core::verify::{dyadic_chaining_check, ks_statistic, moment_ratio_scan, occupation_sandwich};
use loctime_core::{catalog, fejer_kernel, Observable, Sequential, SmoothingKernel, StreamKey, SymbolicSystem};

/// Positive stochastic matrix plus an observable, from raw weights.
fn system_from(d: usize, w: &[f64], phi: &[f64]) -> (SymbolicSystem, Observable) {
    let q = Square::from_fn(d, |x, y| w[x * d + y]);
    let q = Square::from_fn(d, |x, y| q[(x, y)] / q.row(x).iter().sum::<f64>());
    let sys = SymbolicSystem::from_transition(q).unwrap();
    let obs = center_observable(&sys, &Square::from_fn(d, |x, y| phi[x * d + y])).unwrap();
    (sys, obs)
}

fn chain() -> impl Strategy<Value = (SymbolicSystem, Observable)> {
    (2usize..=3).prop_flat_map(|d| {
        (
            Just(d),
            prop::collection::vec(0.05f64..1.0, d * d),
            prop::collection::vec(-2.0f64..2.0, d * d),
        )
            .prop_map(|(d, w, phi)| system_from(d, &w, &phi))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn chaining_inequality_holds(k in 0u32..7, seed in prop::collection::vec(-1e3f64..1e3, 65)) {
        let len = (1usize << k) + 1;
        let r = dyadic_chaining_check(&seed[..len]).unwrap();
        prop_assert!(r.holds);
        prop_assert!(r.sup_pairwise <= r.bound);
    }

    #[test]
    fn stationary_vector_is_invariant((sys, obs) in chain()) {
        prop_assert!(stationarity_residual(sys.transition(), sys.stationary()) <= 1e-12);
        prop_assert!(sys.edge_mean(obs.values()).abs() <= 1e-12);
        let recentered = center_observable(&sys, obs.values()).unwrap();
        for (a, b) in recentered.values().as_slice().iter().zip(obs.values().as_slice()) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn operator_matches_enumeration((sys, obs) in chain(), n in 1usize..7, t in -3.0f64..3.0) {
        let fast = charfn_power(&sys, &obs, n, t).unwrap();
        let slow = brute_force_charfn(&sys, &obs, n, t).unwrap();
        prop_assert!((fast - slow).norm() <= 1e-10);
        prop_assert!(fast.norm() <= 1.0 + 1e-12);
    }

    #[test]
    fn eigenvalue_is_one_at_zero_and_conjugate_symmetric((sys, obs) in chain(), t in 0.001f64..0.3) {
        let e0 = eigen_at(&sys, &obs, 0.0).unwrap();
        prop_assert!((e0.lambda - 1.0).norm() <= 1e-12);
        let (a, b) = (eigen_at(&sys, &obs, t).unwrap(), eigen_at(&sys, &obs, -t).unwrap());
        prop_assert!((a.lambda - b.lambda.conj()).norm() <= 1e-10);
        prop_assert!(a.lambda.norm() <= 1.0 + 1e-12);
    }

    #[test]
    fn sandwich_holds_for_any_window(stream in 0u64..1000, a in -3.0f64..3.0, w in 0.01f64..3.0, eps in 0.001f64..1.0) {
        let ex = catalog::two_state();
        let k = fejer_kernel();
        let p = Sampler::new(&ex.system, &ex.observable).unwrap().sample(500, StreamKey::new(77, stream));
        let r = occupation_sandwich(&p, &k, a, a + w, eps).unwrap();
        prop_assert!(r.lower_ok && r.upper_ok, "{:?}", r);
    }

    #[test]
    fn ks_pass_flag_and_critical_monotonicity(xs in prop::collection::vec(-4.0f64..4.0, 20..200)) {
        let cdf = loctime_core::verify::normal_cdf;
        let r = ks_statistic(&xs, cdf).unwrap();
        prop_assert_eq!(r.pass, r.statistic <= r.critical);
        prop_assert!(r.statistic > 0.0 && r.statistic <= 1.0);
        let mut more = xs.clone();
        more.extend_from_slice(&xs);
        prop_assert!(ks_statistic(&more, cdf).unwrap().critical < r.critical);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn local_time_mass_is_conserved(stream in 0u64..10_000) {
        let k = fejer_kernel();
        for ex in catalog::shipped() {
            let p = Sampler::new(&ex.system, &ex.observable).unwrap().sample(2000, StreamKey::new(3, stream));
            let grid = mass_grid(&p);
            let field = local_time_on(&p, &k, &grid);
            let mass = field.trapezoid_mass();
            prop_assert!((mass / k.mass() - 1.0).abs() <= 1e-3, "{}: {}", ex.name, mass);
            // The pointwise evaluation agrees.
            let slow = local_time_field(&p, &k, &field.x_grid);
            for (a, b) in field.values.iter().zip(&slow.values) {
                prop_assert!((a - b).abs() <= 1e-10 * (1.0 + b.abs()));
            }
        }
    }

    #[test]
    fn moment_scan_is_reproducible(seed in any::<u64>()) {
        let ex = catalog::golden_mean();
        let k = fejer_kernel();
        let run = || moment_ratio_scan(&ex.system, &ex.observable, &k, &[50, 200], 0.1, &[0.05, 0.3], 20, seed, &Sequential).unwrap();
        let (a, b) = (run(), run());
        prop_assert!(a.ratios.iter().flatten().zip(b.ratios.iter().flatten()).all(|(x, y)| x.to_bits() == y.to_bits()));
        prop_assert_eq!(a, b);
    }
}

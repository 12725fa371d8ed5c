use loctime_core::montecarlo::{sample_path, uniform_grid, Sampler};
use loctime_core::verify::*;
use loctime_core::{catalog, fejer_kernel, Error, PathSample, Sequential, SmoothingKernel, StreamKey};

fn zero_path(n: usize) -> PathSample {
    let ex = catalog::trivial();
    sample_path(&ex.system, &ex.observable, n, StreamKey::new(0, 0)).unwrap()
}

#[test]
fn ks_accepts_draws_from_the_reference_law() {
    use rand_core::RngCore;
    let mut rng = StreamKey::new(2024, 0).rng();
    // Inverse-CDF draws from F(x) = x^2 on [0, 1].
    let xs: Vec<f64> = (0..5000)
        .map(|_| ((rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64).sqrt())
        .collect();
    let r = ks_statistic(&xs, |x| (x * x).clamp(0.0, 1.0)).unwrap();
    assert!(r.pass, "{r:?}");
    assert_eq!(r.n_samples, 5000);
}

#[test]
fn degenerate_observable_is_rejected() {
    let ex = catalog::trivial();
    let k = fejer_kernel();
    assert!(matches!(
        clt_check(&ex.system, &ex.observable, 1000, 1000, 1, &Sequential),
        Err(Error::DegenerateVariance { .. })
    ));
    assert!(matches!(
        local_time_law_check(&ex.system, &ex.observable, &k, 1000, 1000, 1, &Sequential),
        Err(Error::DegenerateVariance { .. })
    ));
}

#[test]
fn clt_on_fair_coin_and_two_state_chain() {
    for ex in [catalog::coin(), catalog::two_state()] {
        let r = clt_check(&ex.system, &ex.observable, 10_000, 5000, 11, &Sequential).unwrap();
        assert!(r.pass, "{}: {r:?}", ex.name);
    }
}

#[test]
fn lattice_walk_is_gated() {
    let ex = catalog::integer_lattice();
    let k = fejer_kernel();
    match local_time_law_check(&ex.system, &ex.observable, &k, 1000, 1000, 1, &Sequential) {
        Err(Error::ProbableLattice { max_rho, t }) => {
            assert!(max_rho >= 1.0 - 1e-8);
            assert!((t.abs() - 2.0 * std::f64::consts::PI).abs() < 1e-6, "{t}");
        }
        other => panic!("expected ProbableLattice, got {other:?}"),
    }
}

#[test]
fn non_lattice_example_passes_the_gate() {
    let ex = catalog::iid_three();
    let (_, rho) = aperiodicity_gate(&ex.system, &ex.observable).unwrap();
    assert!(rho < 1.0 - 1e-8);
}

#[test]
fn zero_path_sandwich_has_positive_slack() {
    let k = fejer_kernel();
    let p = zero_path(100);
    let r = occupation_sandwich(&p, &k, -1.0, 1.0, 0.5).unwrap();
    // All S_k = 0: the integral is 2 F(10), the bounds are 2 pi + tail(5) and
    // 2 F(5).
    assert!((r.integral - 2.0 * k.primitive(10.0)).abs() < 1e-14);
    assert!((r.upper_bound - (k.mass() + k.tail_mass(5.0))).abs() < 1e-14);
    assert!((r.lower_bound - k.window_mass(5.0)).abs() < 1e-14);
    assert!(r.slack_lower > 0.0 && r.slack_upper > 0.0);
    assert!(r.lower_ok && r.upper_ok && !r.lower_vacuous);
}

#[test]
fn wide_eps_makes_the_lower_bound_vacuous() {
    let k = fejer_kernel();
    let p = zero_path(100);
    let r = occupation_sandwich(&p, &k, 0.0, 1.0, 1.0).unwrap();
    assert!(r.lower_vacuous && r.lower_ok && r.upper_ok);
    assert_eq!(r.lower_bound, 0.0);
    assert!(matches!(occupation_sandwich(&p, &k, 1.0, 1.0, 0.1), Err(Error::InvalidWindow { .. })));
    assert!(matches!(occupation_sandwich(&p, &k, 0.0, 1.0, 0.0), Err(Error::InvalidWindow { .. })));
}

#[test]
fn sandwich_holds_on_sampled_paths() {
    let k = fejer_kernel();
    for ex in catalog::shipped() {
        let s = Sampler::new(&ex.system, &ex.observable).unwrap();
        for i in 0..10 {
            let p = s.sample(10_000, StreamKey::new(5, i));
            for (a, b, eps) in [(-0.5, 0.5, 0.1), (-2.0, 1.0, 0.05), (0.2, 0.3, 0.2)] {
                let r = occupation_sandwich(&p, &k, a, b, eps).unwrap();
                assert!(r.lower_ok && r.upper_ok, "{}: {r:?}", ex.name);
            }
        }
    }
}

#[test]
fn moment_ratio_on_the_constant_path() {
    let ex = catalog::trivial();
    let k = fejer_kernel();
    let n = 100;
    let r = moment_ratio_scan(&ex.system, &ex.observable, &k, &[n], 0.0, &[1.0], 20, 3, &Sequential).unwrap();
    let root = (n as f64).sqrt();
    let d = root * (k.f(0.0) - k.f(-root));
    assert!((r.ratios[0][0] - d.powi(4)).abs() < 1e-9 * d.powi(4));
    assert!((r.second_moments[0] - (root * k.f(0.0)).powi(2)).abs() < 1e-9);
}

#[test]
fn far_offsets_give_small_ratios() {
    let ex = catalog::two_state();
    let k = fejer_kernel();
    let r = moment_ratio_scan(&ex.system, &ex.observable, &k, &[1000], 0.0, &[0.1, 1000.0], 200, 3, &Sequential).unwrap();
    assert!(r.ratios[0][1] < 1e-3 * r.ratios[0][0]);
    assert!(r.ratios.iter().flatten().all(|&v| v >= 0.0));
}

#[test]
fn modulus_probe_edge_cases() {
    let ex = catalog::two_state();
    let k = fejer_kernel();
    let pts = modulus_probe(&ex.system, &ex.observable, &k, 400, &[0.4, 0.2], 0.0, 5, 1, 257, &Sequential).unwrap();
    assert!(pts.iter().all(|p| p.probability == 1.0));
    assert!(matches!(
        modulus_probe(&ex.system, &ex.observable, &k, 400, &[0.4, 0.01], 0.5, 5, 1, 257, &Sequential),
        Err(Error::GridTooCoarse { .. })
    ));
    assert!(modulus_probe(&ex.system, &ex.observable, &k, 400, &[0.1, 0.2], 0.5, 5, 1, 257, &Sequential).is_err());
}

#[test]
fn chaining_on_local_time_fields() {
    let k = fejer_kernel();
    let ex = catalog::golden_mean();
    let s = Sampler::new(&ex.system, &ex.observable).unwrap();
    let grid = uniform_grid(-2.0, 2.0, 129);
    for i in 0..5 {
        let p = s.sample(2000, StreamKey::new(8, i));
        let field = loctime_core::montecarlo::local_time_field(&p, &k, &grid);
        let r = dyadic_chaining_check(&field.values).unwrap();
        assert!(r.holds, "{r:?}");
    }
}

#[test]
fn charfn_of_normalized_sums_matches_operator_powers() {
    let ex = catalog::two_state();
    let n = 2000;
    let z = normalized_endpoints(&ex.system, &ex.observable, n, 4000, 21, &Sequential).unwrap();
    for c in charfn_agreement(&ex.system, &ex.observable, n, &z, &[0.5, 1.0, 2.0]).unwrap() {
        assert!(c.z_score() <= 3.0, "{c:?}");
    }
}

#[test]
fn tightness_condition_one_via_chebyshev() {
    assert_eq!(chebyshev_tail(4.0, 1.0), 1.0);
    assert!((chebyshev_tail(4.0, 10.0) - 0.04).abs() < 1e-15);
}

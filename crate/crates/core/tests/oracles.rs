//! Cross-checks against independent computations: exhaustive path
//! enumeration, closed forms for i.i.d. and two-state chains, and the real
//! tilted Perron root.

use std::f64::consts::PI;

use loctime_core::kernel_quadrature::{expected_kernel_density, potential_kernel_sum};
use loctime_core::linalg::Square;
use loctime_core::model::{center_observable, perron_eigen};
use loctime_core::spectral::{self, brute_force_charfn, charfn_power, eigen_at};
use loctime_core::{catalog, fejer_kernel, Complex64, Observable, SmoothingKernel, SymbolicSystem};

fn four_state() -> (SymbolicSystem, Observable) {
    let a = Square::from_fn(4, |x, y| !(x == 3 && y == 3) && !(x == 0 && y == 2));
    let q = Square::from_fn(4, |x, y| {
        if !a[(x, y)] {
            return 0.0;
        }
        1.0 + ((3 * x + 5 * y) % 7) as f64
    });
    let q = Square::from_fn(4, |x, y| q[(x, y)] / q.row(x).iter().sum::<f64>());
    let sys = SymbolicSystem::new(a, q).unwrap();
    let raw = Square::from_fn(4, |x, y| (x as f64 - 1.3 * y as f64).sin() + 0.2 * x as f64);
    let obs = center_observable(&sys, &raw).unwrap();
    (sys, obs)
}

fn small_systems() -> Vec<(&'static str, SymbolicSystem, Observable)> {
    let mut out: Vec<_> = ["two-state", "golden-mean", "iid-three", "integer-lattice"]
        .iter()
        .map(|n| {
            let ex = catalog::by_name(n).unwrap();
            (ex.name, ex.system, ex.observable)
        })
        .collect();
    let (s, o) = four_state();
    out.push(("four-state", s, o));
    out
}

/// Law of `S_n` by exhaustive enumeration: `(probability, sum)` pairs.
fn enumerate_law(sys: &SymbolicSystem, obs: &Observable, n: usize) -> Vec<(f64, f64)> {
    fn walk(sys: &SymbolicSystem, obs: &Observable, x: usize, left: usize, p: f64, s: f64, out: &mut Vec<(f64, f64)>) {
        if left == 0 {
            out.push((p, s));
            return;
        }
        for y in 0..sys.dim() {
            let q = sys.transition()[(x, y)];
            if q > 0.0 {
                walk(sys, obs, y, left - 1, p * q, s + obs.at(x, y), out);
            }
        }
    }
    let mut out = Vec::new();
    for x in 0..sys.dim() {
        walk(sys, obs, x, n, sys.stationary()[x], 0.0, &mut out);
    }
    out
}

#[test]
fn exact_algebra_at_zero_frequency() {
    for (name, sys, obs) in small_systems() {
        let d = sys.dim();
        let p0 = spectral::char_operator(&sys, &obs, 0.0).unwrap();
        let one = p0.matrix.apply(&spectral::ones(d));
        let pi_c: Vec<Complex64> = sys.stationary().iter().map(|&p| Complex64::new(p, 0.0)).collect();
        let pi_back = p0.matrix.apply_left(&pi_c);
        for x in 0..d {
            assert!((one[x] - 1.0).norm() <= 1e-12, "{name}: T1 != 1");
            assert!((pi_back[x] - pi_c[x]).norm() <= 1e-12, "{name}: m o T != m");
        }
        let e = eigen_at(&sys, &obs, 0.0).unwrap();
        assert!((e.lambda - 1.0).norm() <= 1e-12, "{name}");
        assert!(e.eta.iter().all(|h| (h - 1.0).norm() <= 1e-12), "{name}");
        assert!(loctime_core::model::stationarity_residual(sys.transition(), sys.stationary()) <= 1e-12);
    }
}

#[test]
fn operator_powers_match_path_enumeration() {
    for (name, sys, obs) in small_systems() {
        for n in [1, 2, 5, 10] {
            for t in [0.1, 0.7, 2.3] {
                let fast = charfn_power(&sys, &obs, n, t).unwrap();
                let slow = brute_force_charfn(&sys, &obs, n, t).unwrap();
                assert!((fast - slow).norm() <= 1e-10, "{name} n={n} t={t}: {fast} vs {slow}");
            }
        }
    }
}

#[test]
fn enumeration_agrees_with_explicit_law() {
    let (sys, obs) = four_state();
    let law = enumerate_law(&sys, &obs, 6);
    let t = 0.7;
    let direct: Complex64 = law.iter().map(|&(p, s)| p * Complex64::new(0.0, t * s).exp()).sum();
    assert!((direct - brute_force_charfn(&sys, &obs, 6, t).unwrap()).norm() < 1e-12);
}

#[test]
fn iid_eigenvalue_is_the_characteristic_function() {
    for name in ["iid-three", "integer-lattice", "coin"] {
        let ex = catalog::by_name(name).unwrap();
        let pi = ex.system.stationary();
        for j in -50..=50 {
            let t = j as f64 / 100.0;
            let classical: Complex64 = (0..pi.len())
                .map(|x| pi[x] * Complex64::new(0.0, t * ex.observable.at(x, 0)).exp())
                .sum();
            let lam = eigen_at(&ex.system, &ex.observable, t).unwrap().lambda;
            assert!((lam - classical).norm() <= 1e-10, "{name} t={t}");
        }
    }
}

#[test]
fn two_state_variance_closed_form() {
    // Var_pi(g) (1 + r) / (1 - r) with r = 0.4 the second eigenvalue and
    // Var_pi(g) = 1 - (2/3)^2.
    let ex = catalog::two_state();
    let r = spectral::variance(&ex.system, &ex.observable).unwrap();
    assert!((r.v_gk - 35.0 / 27.0).abs() < 1e-12);
    assert!(r.rel_err < 1e-4);
}

#[test]
fn iid_variance_is_the_second_moment() {
    let ex = catalog::iid_three();
    let s2 = 2.0f64.sqrt();
    let expect = (1.0 + 2.0 + (1.0 + s2).powi(2)) / 3.0;
    let r = spectral::variance(&ex.system, &ex.observable).unwrap();
    assert!((r.v_gk - expect).abs() < 1e-12);
    assert!((r.v_fd - expect).abs() / expect < 1e-6);
}

#[test]
fn variance_matches_real_tilted_perron_root() {
    // log rho(Q e^{s phi}) has second derivative v at s = 0.
    for ex in catalog::shipped() {
        let q = ex.system.transition();
        let log_rho = |s: f64| {
            let m = Square::from_fn(q.dim(), |x, y| q[(x, y)] * (s * ex.observable.at(x, y)).exp());
            perron_eigen(&m).unwrap().0.ln()
        };
        let h = 1e-3;
        let v_tilt = (log_rho(h) - 2.0 * log_rho(0.0) + log_rho(-h)) / (h * h);
        let r = spectral::variance(&ex.system, &ex.observable).unwrap();
        assert!((v_tilt - r.v_gk).abs() / r.v_gk < 1e-5, "{}: {v_tilt} vs {}", ex.name, r.v_gk);
    }
}

#[test]
fn variance_agreement_on_shipped_examples() {
    for ex in catalog::shipped() {
        let r = spectral::variance(&ex.system, &ex.observable).unwrap();
        assert!(r.v_gk > 0.5, "{}", ex.name);
        assert!(r.rel_err <= 1e-4, "{}: {}", ex.name, r.rel_err);
    }
}

#[test]
fn kernel_density_matches_enumerated_law() {
    let k = fejer_kernel();
    for (name, sys, obs) in small_systems() {
        let n = 7;
        let law = enumerate_law(&sys, &obs, n);
        for x in [0.0, 0.8, -2.5, 11.0] {
            let direct: f64 = law.iter().map(|&(p, s)| p * k.f(s - x)).sum();
            let quad = expected_kernel_density(&sys, &obs, &k, n, x).unwrap();
            assert!((quad - direct).abs() < 1e-9, "{name} x={x}: {quad} vs {direct}");
        }
    }
}

#[test]
fn potential_kernel_terms_match_enumerated_law() {
    let k = fejer_kernel();
    let (sys, obs) = four_state();
    let y = 0.6;
    let series = potential_kernel_sum(&sys, &obs, &k, y, 6).unwrap();
    for n in 1..=6 {
        let law = enumerate_law(&sys, &obs, n);
        let direct: f64 = law.iter().map(|&(p, s)| p * (k.f(s) - k.f(s + y))).sum::<f64>().abs();
        assert!((series.terms[n - 1] - direct).abs() < 1e-9, "n={n}");
    }
}

#[test]
fn coin_kernel_density_at_zero() {
    // S_2 in {-2, 0, 2} with weights 1/4, 1/2, 1/4.
    let ex = catalog::coin();
    let k = fejer_kernel();
    let expect = 0.5 * k.f(0.0) + 0.5 * k.f(2.0);
    let got = expected_kernel_density(&ex.system, &ex.observable, &k, 2, 0.0).unwrap();
    assert!((got - expect).abs() < 1e-10);
    assert!((k.f(2.0) - (1.0f64.sin()).powi(2)).abs() < 1e-15);
    assert!((k.mass() - 2.0 * PI).abs() < 1e-15);
}

#[test]
fn conjugation_symmetry() {
    for ex in catalog::shipped() {
        for t in [1e-3, 0.01, 0.1, 0.4] {
            let a = eigen_at(&ex.system, &ex.observable, t).unwrap().lambda;
            let b = eigen_at(&ex.system, &ex.observable, -t).unwrap().lambda;
            assert!((a - b.conj()).norm() <= 1e-10, "{}", ex.name);
        }
    }
}

#[test]
fn eta_derivative_is_imaginary() {
    for ex in catalog::shipped() {
        let coarse = spectral::eta_prime_check(&ex.system, &ex.observable, 1e-3).unwrap();
        let fine = spectral::eta_prime_check(&ex.system, &ex.observable, 5e-4).unwrap();
        // Exactly zero up to roundoff, by conjugation symmetry.
        assert!(coarse < 1e-8 && fine < 1e-8, "{}: {coarse} {fine}", ex.name);
    }
}

#[test]
fn lattice_example_reaches_the_unit_circle_at_two_pi() {
    let ex = catalog::integer_lattice();
    let scan = spectral::aperiodicity_scan(&ex.system, &ex.observable, 2.0 * PI / 64.0, 7.0, 2.0 * PI / 64.0).unwrap();
    assert!(scan.max_rho >= spectral::LATTICE_THRESHOLD);
    assert!((scan.argmax_t.abs() - 2.0 * PI).abs() < 1e-9);
}

#[test]
fn shipped_examples_contract_on_kernel_support() {
    for ex in catalog::shipped() {
        let scan = spectral::aperiodicity_scan(&ex.system, &ex.observable, 0.05, 1.0, 0.01).unwrap();
        assert!(scan.max_rho <= 0.999, "{}: {}", ex.name, scan.max_rho);
    }
}

//! Characteristic-function operators and their perturbation theory.
//!
//! Functions of the zeroth coordinate form a `d`-dimensional space that is
//! invariant under the transfer operator and all of its twists, so
//! `P(t) g = T^(e^{it phi} g)` is the `d x d` matrix
//!
//! ```text
//! P(t)[y][x] = pi[x] Q[x][y] exp(i t phi(x, y)) / pi[y]
//! ```
//!
//! acting on vectors indexed by `x`. Its iterates give the characteristic
//! function of the Birkhoff sum: `E exp(i t S_n) = m(P(t)^n 1)`.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::linalg::{self, Square};
use crate::model::{Observable, SymbolicSystem};
use crate::{Error, Result};

const EIGEN_TOL: f64 = 1e-12;
const EIGEN_MAX_ITER: usize = 100_000;
const GELFAND_LEVELS: usize = 12;
const GELFAND_RTOL: f64 = 1e-6;
const SERIES_TOL: f64 = 1e-14;
const SERIES_MAX_TERMS: usize = 10_000;
const FD_STEP: f64 = 1e-3;

/// Paths allowed in [`brute_force_charfn`].
pub const ENUMERATION_LIMIT: f64 = 1e7;

/// `P(t)` at one frequency. At `t = 0` this is the transfer operator.
#[derive(Debug, Clone, PartialEq)]
pub struct CharOperatorSample {
    pub t: f64,
    pub matrix: Square<Complex64>,
}

impl CharOperatorSample {
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// `m(P(t)^n g)` by repeated application.
    pub fn expectation_of_power(&self, pi: &[f64], n: usize, g: &[Complex64]) -> Complex64 {
        let mut v = g.to_vec();
        let mut w = vec![Complex64::new(0.0, 0.0); v.len()];
        for _ in 0..n {
            self.matrix.apply_into(&v, &mut w);
            core::mem::swap(&mut v, &mut w);
        }
        linalg::weighted_sum(pi, &v)
    }
}

pub fn ones(d: usize) -> Vec<Complex64> {
    vec![Complex64::new(1.0, 0.0); d]
}

fn check_dims(sys: &SymbolicSystem, obs: &Observable) -> Result<()> {
    if obs.values().dim() != sys.dim() {
        return Err(Error::DimensionMismatch {
            expected: sys.dim(),
            found: obs.values().dim(),
        });
    }
    Ok(())
}

/// Builds `P(t)`.
pub fn char_operator(sys: &SymbolicSystem, obs: &Observable, t: f64) -> Result<CharOperatorSample> {
    check_dims(sys, obs)?;
    if !obs.is_centered() {
        return Err(Error::UncenteredObservable);
    }
    let pi = sys.stationary();
    let q = sys.transition();
    let matrix = Square::from_fn(sys.dim(), |y, x| {
        if q[(x, y)] > 0.0 {
            let (s, c) = (t * obs.at(x, y)).sin_cos();
            Complex64::new(c, s) * (pi[x] * q[(x, y)] / pi[y])
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    Ok(CharOperatorSample { t, matrix })
}

/// `m(P(t)^n 1) = E exp(i t S_n)` through matrix-vector products.
pub fn charfn_power(sys: &SymbolicSystem, obs: &Observable, n: usize, t: f64) -> Result<Complex64> {
    let p = char_operator(sys, obs, t)?;
    Ok(p.expectation_of_power(sys.stationary(), n, &ones(sys.dim())))
}

/// `E exp(i t S_n)` by summing over every admissible path `(x_0, ..., x_n)`.
/// Independent of the operator route; limited to `d^(n+1) <= 1e7`.
pub fn brute_force_charfn(sys: &SymbolicSystem, obs: &Observable, n: usize, t: f64) -> Result<Complex64> {
    check_dims(sys, obs)?;
    let d = sys.dim();
    let paths = (d as f64).powi(n as i32 + 1);
    if paths > ENUMERATION_LIMIT {
        return Err(Error::TooLarge {
            paths,
            limit: ENUMERATION_LIMIT,
        });
    }

    fn walk(sys: &SymbolicSystem, obs: &Observable, t: f64, x: usize, left: usize, weight: f64, sum: f64) -> Complex64 {
        if left == 0 {
            let (s, c) = (t * sum).sin_cos();
            return Complex64::new(c, s) * weight;
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for y in 0..sys.dim() {
            let p = sys.transition()[(x, y)];
            if p > 0.0 {
                acc += walk(sys, obs, t, y, left - 1, weight * p, sum + obs.at(x, y));
            }
        }
        acc
    }

    Ok((0..d)
        .map(|x0| walk(sys, obs, t, x0, n, sys.stationary()[x0], 0.0))
        .sum())
}

/// Dominant eigenvalue `lambda(t)` with eigenvector `eta` (normalized by
/// `m(eta) = 1`) and eigenfunctional `xi` (normalized by `<xi, eta> = 1`).
#[derive(Debug, Clone, PartialEq)]
pub struct EigenData {
    pub t: f64,
    pub lambda: Complex64,
    pub eta: Vec<Complex64>,
    pub xi: Vec<Complex64>,
    /// `rho(N(t)) / |lambda(t)|` with `N(t) = P(t) - lambda(t) <xi, .> eta`.
    pub gap_ratio: f64,
}

impl EigenData {
    /// `N(t) = P(t) - lambda <xi, .> eta`.
    pub fn remainder(&self, sample: &CharOperatorSample) -> Square<Complex64> {
        let d = sample.dim();
        Square::from_fn(d, |i, j| sample.matrix[(i, j)] - self.lambda * self.eta[i] * self.xi[j])
    }

    /// `|P eta - lambda eta|_inf`.
    pub fn residual(&self, sample: &CharOperatorSample) -> f64 {
        let pe = sample.matrix.apply(&self.eta);
        pe.iter()
            .zip(&self.eta)
            .map(|(a, b)| (a - self.lambda * b).norm())
            .fold(0.0, f64::max)
    }
}

/// Power iteration on `P(t)` and on its adjoint.
///
/// Fails with [`Error::NonconvergentEigen`] when successive iterates do not
/// settle to `1e-12` within `1e5` steps, which happens when the dominant
/// eigenvalue is not separated (typically `t` outside the perturbation
/// window).
pub fn dominant_eigen(sample: &CharOperatorSample, pi: &[f64]) -> Result<EigenData> {
    let m = &sample.matrix;
    let d = m.dim();
    let nonconvergent = |iterations, residual| Error::NonconvergentEigen { iterations, residual };

    let mut eta = ones(d);
    let mut converged = false;
    let mut change = f64::INFINITY;
    let mut w = vec![Complex64::new(0.0, 0.0); d];
    for _ in 0..EIGEN_MAX_ITER {
        m.apply_into(&eta, &mut w);
        let mass = linalg::weighted_sum(pi, &w);
        if !(mass.norm() > 1e-300) || !mass.re.is_finite() {
            return Err(nonconvergent(0, f64::INFINITY));
        }
        for z in &mut w {
            *z /= mass;
        }
        change = linalg::max_dist(&w, &eta);
        core::mem::swap(&mut eta, &mut w);
        if change <= EIGEN_TOL {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(nonconvergent(EIGEN_MAX_ITER, change));
    }

    let mut xi: Vec<Complex64> = pi.iter().map(|&p| Complex64::new(p, 0.0)).collect();
    converged = false;
    for _ in 0..EIGEN_MAX_ITER {
        let next = m.apply_left(&xi);
        let pairing = linalg::pair(&next, &eta);
        if !(pairing.norm() > 1e-300) {
            return Err(nonconvergent(0, f64::INFINITY));
        }
        let next: Vec<Complex64> = next.into_iter().map(|z| z / pairing).collect();
        change = linalg::max_dist(&next, &xi);
        xi = next;
        if change <= EIGEN_TOL {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(nonconvergent(EIGEN_MAX_ITER, change));
    }

    // Two-sided quotient: errors in eta and xi enter only at second order.
    let lambda = linalg::pair(&xi, &m.apply(&eta)) / linalg::pair(&xi, &eta);
    let mut data = EigenData {
        t: sample.t,
        lambda,
        eta,
        xi,
        gap_ratio: 0.0,
    };
    let rho_rest = spectral_radius(&data.remainder(sample))?;
    data.gap_ratio = rho_rest / lambda.norm();
    if !(data.gap_ratio < 1.0) {
        return Err(nonconvergent(EIGEN_MAX_ITER, data.gap_ratio));
    }
    Ok(data)
}

/// Eigendata of `P(t)` for a system and observable.
pub fn eigen_at(sys: &SymbolicSystem, obs: &Observable, t: f64) -> Result<EigenData> {
    dominant_eigen(&char_operator(sys, obs, t)?, sys.stationary())
}

/// Spectral radius by Gelfand's formula on repeated squarings.
///
/// Keeps `M^(2^k)` normalized and tracks `L_k = log |M^(2^k)|` in the max
/// Frobenius norm. The estimate at level `k` is
/// `exp((L_{k+1} - L_k) / 2^k)`, i.e. `(|M^(2n)| / |M^n|)^(1/n)`, which
/// cancels the constant in `|M^n| ~ C rho^n`. Stops once three consecutive
/// estimates agree to `1e-6` relative, or after 12 squarings.
pub fn spectral_radius(m: &Square<Complex64>) -> Result<f64> {
    if !m.is_finite() {
        return Err(Error::Overflow);
    }
    let norm = m.frobenius_norm();
    if norm == 0.0 {
        return Ok(0.0);
    }
    if !norm.is_finite() {
        return Err(Error::Overflow);
    }
    let mut a = m.clone();
    a.scale(1.0 / norm);
    let mut log_norm = norm.ln();
    let mut prev: Option<f64> = None;
    let mut settled = false;
    let mut estimate = norm;
    let mut power = 1.0f64;
    for _ in 0..GELFAND_LEVELS {
        let sq = a.matmul(&a);
        let sq_norm = sq.frobenius_norm();
        if sq_norm == 0.0 {
            return Ok(0.0);
        }
        if !sq_norm.is_finite() {
            return Err(Error::Overflow);
        }
        // log ||M^{2p}|| - log ||M^p||, per factor of M.
        let next_log = 2.0 * log_norm + sq_norm.ln();
        estimate = ((next_log - log_norm) / power).exp();
        if let Some(p) = prev {
            // Two agreeing levels in a row, so a lucky crossing does not stop us.
            let agree = (estimate - p).abs() <= GELFAND_RTOL * estimate;
            if agree && settled {
                return Ok(estimate);
            }
            settled = agree;
        }
        prev = Some(estimate);
        a = sq;
        a.scale(1.0 / sq_norm);
        log_norm = next_log;
        power *= 2.0;
    }
    Ok(estimate)
}

/// Result of [`aperiodicity_scan`].
#[derive(Debug, Clone, PartialEq)]
pub struct AperiodicityScan {
    pub max_rho: f64,
    pub argmax_t: f64,
    /// `(t, rho(P(t)))` for every grid point, positive and negative.
    pub samples: Vec<(f64, f64)>,
}


/// Threshold at or above which a scan is read as a lattice observable.
pub const LATTICE_THRESHOLD: f64 = 1.0 - 1e-8;

/// Grid `t_lo, t_lo + step, ...` up to `t_hi`.
pub fn frequency_grid(t_lo: f64, t_hi: f64, step: f64) -> Result<Vec<f64>> {
    if !(t_lo > 0.0) {
        return Err(Error::InvalidGrid("t_lo must be positive"));
    }
    if !(t_hi > t_lo) {
        return Err(Error::InvalidGrid("t_hi must exceed t_lo"));
    }
    if !(step > 0.0) || !step.is_finite() {
        return Err(Error::InvalidGrid("step must be positive"));
    }
    let count = ((t_hi - t_lo) / step * (1.0 + 1e-12)).floor() as usize + 1;
    if count > 10_000_000 {
        return Err(Error::InvalidGrid("too many grid points"));
    }
    Ok((0..count).map(|k| t_lo + k as f64 * step).collect())
}

/// Maximum of `rho(P(t))` over `+-[t_lo, t_hi]` on a uniform grid. Values
/// at or above [`LATTICE_THRESHOLD`] signal failure of aperiodicity.
pub fn aperiodicity_scan(
    sys: &SymbolicSystem,
    obs: &Observable,
    t_lo: f64,
    t_hi: f64,
    step: f64,
) -> Result<AperiodicityScan> {
    let grid = frequency_grid(t_lo, t_hi, step)?;
    let mut samples = Vec::with_capacity(2 * grid.len());
    let mut max_rho = f64::NEG_INFINITY;
    let mut argmax_t = t_lo;
    for &t in &grid {
        for s in [t, -t] {
            let rho = spectral_radius(&char_operator(sys, obs, s)?.matrix)?;
            samples.push((s, rho));
            if rho > max_rho {
                max_rho = rho;
                argmax_t = s;
            }
        }
    }
    Ok(AperiodicityScan {
        max_rho,
        argmax_t,
        samples,
    })
}

/// Golden-section refinement of a local maximum of `rho(P(t))` on
/// `[center - radius, center + radius]`. Returns `(t, rho)`.
pub fn refine_peak(sys: &SymbolicSystem, obs: &Observable, center: f64, radius: f64) -> Result<(f64, f64)> {
    let rho = |t: f64| -> Result<f64> { spectral_radius(&char_operator(sys, obs, t)?.matrix) };
    let inv_phi = (5.0f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (center - radius, center + radius);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (rho(c)?, rho(d)?);
    while (b - a).abs() > 1e-10 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = rho(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = rho(d)?;
        }
    }
    let mut best = (center, rho(center)?);
    for t in [c, d, 0.5 * (a + b)] {
        let r = rho(t)?;
        if r > best.1 {
            best = (t, r);
        }
    }
    Ok(best)
}

/// Largest dyadic `delta <= 0.5` at which power iteration converges at
/// `t = +-delta` with `gap_ratio <= 0.95`. Used as the perturbation window.
pub fn perturbation_window(sys: &SymbolicSystem, obs: &Observable) -> Result<f64> {
    let mut delta = 0.5;
    while delta > 1e-6 {
        let ok = [delta, -delta]
            .iter()
            .all(|&t| matches!(eigen_at(sys, obs, t), Ok(e) if e.gap_ratio <= 0.95));
        if ok {
            return Ok(delta);
        }
        delta /= 2.0;
    }
    Err(Error::NonconvergentEigen {
        iterations: EIGEN_MAX_ITER,
        residual: delta,
    })
}

/// Samples of `lambda(t)` over a grid, with the fitted curvature constant.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenCurve {
    pub samples: Vec<EigenData>,
    /// `min_t (1 - |lambda(t)|) / t^2` over nonzero grid points, so that
    /// `|lambda(t)| <= 1 - c t^2` on the grid.
    pub c_fit: f64,
}

impl EigenCurve {
    /// Largest `|lambda(t) - conj(lambda(-t))|` over grid pairs `+-t`.
    pub fn conjugation_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for a in &self.samples {
            if let Some(b) = self.samples.iter().find(|b| b.t == -a.t) {
                worst = worst.max((a.lambda - b.lambda.conj()).norm());
            }
        }
        worst
    }

    pub fn max_modulus(&self) -> f64 {
        self.samples.iter().map(|e| e.lambda.norm()).fold(0.0, f64::max)
    }
}

pub fn eigenvalue_curve(sys: &SymbolicSystem, obs: &Observable, grid: &[f64]) -> Result<EigenCurve> {
    let samples = grid
        .iter()
        .map(|&t| eigen_at(sys, obs, t))
        .collect::<Result<Vec<_>>>()?;
    let c_fit = samples
        .iter()
        .filter(|e| e.t != 0.0)
        .map(|e| (1.0 - e.lambda.norm()) / (e.t * e.t))
        .fold(f64::INFINITY, f64::min);
    Ok(EigenCurve { samples, c_fit })
}

/// Limiting variance computed two independent ways.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarianceReport {
    /// `Var(phi) + 2 sum_k Cov(phi(x0,x1), phi(xk,xk+1))`.
    pub v_gk: f64,
    /// `-lambda''(0)` by Richardson-extrapolated central differences.
    pub v_fd: f64,
    pub rel_err: f64,
    /// Covariance terms summed.
    pub terms: usize,
}

/// Green-Kubo series for the limiting variance, summed exactly from `pi`,
/// `Q` and matrix powers.
///
/// With `a[y] = sum_x pi[x] Q[x][y] phi(x,y)` and
/// `b[x] = sum_y Q[x][y] phi(x,y)`, the lag-`k` covariance is
/// `a Q^(k-1) b`. Since `a` sums to zero and `Q` is stochastic, `|a Q^j|_1`
/// never increases, so the series stops once `|a Q^j|_1 |b|_inf < 1e-14`.
pub fn green_kubo(sys: &SymbolicSystem, obs: &Observable) -> Result<(f64, usize)> {
    check_dims(sys, obs)?;
    if !obs.is_centered() {
        return Err(Error::UncenteredObservable);
    }
    let d = sys.dim();
    let pi = sys.stationary();
    let q = sys.transition();
    let second = sys.edge_mean(&obs.values().map(|v| v * v));
    let mut a = vec![0.0; d];
    let mut b = vec![0.0; d];
    for x in 0..d {
        for y in 0..d {
            if q[(x, y)] > 0.0 {
                let w = q[(x, y)] * obs.at(x, y);
                a[y] += pi[x] * w;
                b[x] += w;
            }
        }
    }
    let b_max = b.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let mut cov_sum = 0.0;
    let mut r = a;
    for k in 1..=SERIES_MAX_TERMS {
        let r_l1: f64 = r.iter().map(|v| v.abs()).sum();
        if r_l1 * b_max < SERIES_TOL {
            return Ok((second + 2.0 * cov_sum, k - 1));
        }
        cov_sum += r.iter().zip(&b).map(|(u, v)| u * v).sum::<f64>();
        r = q.apply_left(&r);
    }
    Err(Error::NonconvergentSeries {
        terms: SERIES_MAX_TERMS,
    })
}

/// `-lambda''(0)` from central second differences at `h = 1e-3` and `h/2`,
/// combined by one Richardson step.
pub fn eigenvalue_curvature(sys: &SymbolicSystem, obs: &Observable) -> Result<f64> {
    let lam = |t: f64| -> Result<f64> { Ok(eigen_at(sys, obs, t)?.lambda.re) };
    let l0 = lam(0.0)?;
    let second_diff = |h: f64| -> Result<f64> { Ok((lam(h)? - 2.0 * l0 + lam(-h)?) / (h * h)) };
    let coarse = second_diff(FD_STEP)?;
    let fine = second_diff(FD_STEP / 2.0)?;
    Ok(-(4.0 * fine - coarse) / 3.0)
}

pub fn variance(sys: &SymbolicSystem, obs: &Observable) -> Result<VarianceReport> {
    let (v_gk, terms) = green_kubo(sys, obs)?;
    let v_fd = eigenvalue_curvature(sys, obs)?;
    Ok(VarianceReport {
        v_gk,
        v_fd,
        rel_err: (v_gk - v_fd).abs() / v_gk.max(1e-12),
        terms,
    })
}

/// `|N(t)^n 1|_inf` for `n = 1..=n_max`.
pub fn remainder_decay(sys: &SymbolicSystem, obs: &Observable, t: f64, n_max: usize) -> Result<Vec<f64>> {
    let sample = char_operator(sys, obs, t)?;
    let eig = dominant_eigen(&sample, sys.stationary())?;
    let n = eig.remainder(&sample);
    let mut v = ones(sys.dim());
    let mut out = Vec::with_capacity(n_max);
    for _ in 0..n_max {
        v = n.apply(&v);
        out.push(linalg::max_norm(&v));
    }
    Ok(out)
}

/// Least-squares slope of `log norms[n-1]` against `n`, using only entries
/// above `floor`. `None` with fewer than three usable points.
pub fn log_slope(norms: &[f64], floor: f64) -> Option<f64> {
    let pts: Vec<(f64, f64)> = norms
        .iter()
        .enumerate()
        .filter(|(_, &v)| v > floor)
        .map(|(i, &v)| ((i + 1) as f64, v.ln()))
        .collect();
    if pts.len() < 3 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    Some(sxy / sxx)
}

/// Max-norm of the real part of `(eta(h) - eta(-h)) / 2h`, which vanishes
/// when `eta'(0)` is purely imaginary.
pub fn eta_prime_check(sys: &SymbolicSystem, obs: &Observable, h: f64) -> Result<f64> {
    if !(h > 0.0 && h <= 1e-3) {
        return Err(Error::InvalidParameter("step must lie in (0, 1e-3]"));
    }
    let plus = eigen_at(sys, obs, h)?.eta;
    let minus = eigen_at(sys, obs, -h)?.eta;
    Ok(plus
        .iter()
        .zip(&minus)
        .map(|(a, b)| ((a - b) / (2.0 * h)).re.abs())
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn gelfand_examples() {
        let z = Complex64::new(0.0, 0.0);
        let o = Complex64::new(1.0, 0.0);
        let nil = Square::from_rows(&[[z, o], [z, z]]).unwrap();
        assert_eq!(spectral_radius(&nil).unwrap(), 0.0);
        let diag = Square::from_rows(&[[o * 0.5, z], [z, o * 0.2]]).unwrap();
        assert!((spectral_radius(&diag).unwrap() - 0.5).abs() < 1e-12);
        let ex = catalog::two_state();
        let tr = char_operator(&ex.system, &ex.observable, 0.0).unwrap();
        assert!((spectral_radius(&tr.matrix).unwrap() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn gelfand_handles_rotation_and_jordan_blocks() {
        let c = |re: f64, im: f64| Complex64::new(re, im);
        // Eigenvalues 0.9 e^{+-i}: equal moduli, rotating phases.
        let (s, co) = 1.0f64.sin_cos();
        let rot = Square::from_rows(&[[c(0.9 * co, 0.0), c(-0.9 * s, 0.0)], [c(0.9 * s, 0.0), c(0.9 * co, 0.0)]]).unwrap();
        assert!((spectral_radius(&rot).unwrap() - 0.9).abs() < 1e-6);
        let jordan = Square::from_rows(&[[c(0.7, 0.0), c(1.0, 0.0)], [c(0.0, 0.0), c(0.7, 0.0)]]).unwrap();
        assert!((spectral_radius(&jordan).unwrap() - 0.7).abs() < 1e-3);
    }

    #[test]
    fn uncentered_rejected() {
        let ex = catalog::two_state();
        let raw = Observable::uncentered(ex.observable.values().clone());
        assert_eq!(char_operator(&ex.system, &raw, 0.1), Err(Error::UncenteredObservable));
    }

    #[test]
    fn bad_grids() {
        let ex = catalog::iid_three();
        for (lo, hi, step) in [(0.0, 1.0, 0.1), (-0.5, 1.0, 0.1), (1.0, 0.5, 0.1), (0.1, 1.0, 0.0)] {
            assert!(matches!(
                aperiodicity_scan(&ex.system, &ex.observable, lo, hi, step),
                Err(Error::InvalidGrid(_))
            ));
        }
    }

    #[test]
    fn log_slope_of_geometric_sequence() {
        let norms: Vec<f64> = (1..=20).map(|n| 3.0 * 0.5f64.powi(n)).collect();
        assert!((log_slope(&norms, 0.0).unwrap() - 0.5f64.ln()).abs() < 1e-12);
        assert_eq!(log_slope(&norms[..2], 0.0), None);
    }
}

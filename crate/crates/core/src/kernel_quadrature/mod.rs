//! Smoothing kernels with compactly supported Fourier transform, and the
//! Fourier-inversion integrals built on them.
//!
//! Conventions: `f(x) = int fhat(t) e^{itx} dt`, hence `int f = 2 pi fhat(0)`.
//! For a kernel supported in `[-1, 1]` in frequency,
//!
//! ```text
//! m(f(S_n - x)) = int_{-1}^{1} fhat(t) m(P(t)^n 1) e^{-itx} dt,
//! ```
//!
//! which is evaluated by composite quadrature with `m(P(t)^n 1)` obtained
//! from matrix-vector products at every node.

mod fejer;

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::model::{Observable, SymbolicSystem};
use crate::spectral::{self, char_operator, CharOperatorSample};
use crate::{Error, Result};

pub use fejer::{fejer_kernel, sine_integral, Fejer};

/// Largest imaginary part tolerated in an integral that must be real.
pub const IMAG_TOL: f64 = 1e-10;

/// Default node count: `2^12 + 1`.
pub const DEFAULT_NODES: usize = (1 << 12) + 1;

/// A smoothing function `f` with `fhat` supported in `[-support, support]`.
pub trait SmoothingKernel {
    fn f(&self, x: f64) -> f64;
    fn fhat(&self, t: f64) -> f64;
    fn support(&self) -> f64;
    fn mass(&self) -> f64;
    /// `int_0^u f(x) dx`.
    fn primitive(&self, u: f64) -> f64;

    /// `int_u^inf f`.
    fn tail_mass(&self, u: f64) -> f64 {
        0.5 * self.mass() - self.primitive(u)
    }

    /// `int_{-u}^{u} f`.
    fn window_mass(&self, u: f64) -> f64 {
        2.0 * self.primitive(u)
    }

    /// Adds `f(u0 + j du)` to `acc[j]` for every `j`. Kernels may override
    /// this with a faster evaluation along the progression.
    fn accumulate_progression(&self, u0: f64, du: f64, acc: &mut [f64]) {
        for (j, a) in acc.iter_mut().enumerate() {
            *a += self.f(u0 + j as f64 * du);
        }
    }
}

impl<K: SmoothingKernel + ?Sized> SmoothingKernel for &K {
    fn f(&self, x: f64) -> f64 {
        (**self).f(x)
    }
    fn fhat(&self, t: f64) -> f64 {
        (**self).fhat(t)
    }
    fn support(&self) -> f64 {
        (**self).support()
    }
    fn mass(&self) -> f64 {
        (**self).mass()
    }
    fn primitive(&self, u: f64) -> f64 {
        (**self).primitive(u)
    }
    fn accumulate_progression(&self, u0: f64, du: f64, acc: &mut [f64]) {
        (**self).accumulate_progression(u0, du, acc)
    }
}

/// Composite Simpson nodes and weights on `[a, b]`.
///
/// For integrands carrying an oscillating factor `e^{-i omega t}` the grid
/// also provides Filon weights, which integrate the piecewise quadratic
/// interpolant of the smooth part against the exponential exactly, so the
/// accuracy does not degrade as `omega` grows. At `omega = 0` they coincide
/// with the Simpson weights.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureGrid {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    half_panel: f64,
}

impl QuadratureGrid {
    pub fn simpson(a: f64, b: f64, count: usize) -> Result<Self> {
        if count < 3 || count % 2 == 0 {
            return Err(Error::InvalidGrid("Simpson needs an odd node count >= 3"));
        }
        if !(b > a) {
            return Err(Error::InvalidGrid("empty interval"));
        }
        let h = (b - a) / (count - 1) as f64;
        let nodes: Vec<f64> = (0..count)
            .map(|j| if j == count - 1 { b } else { a + j as f64 * h })
            .collect();
        let weights = (0..count)
            .map(|j| {
                let c = if j == 0 || j == count - 1 {
                    1.0
                } else if j % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                c * h / 3.0
            })
            .collect();
        Ok(QuadratureGrid {
            nodes,
            weights,
            half_panel: h,
        })
    }

    /// `[-1, 1]` with the default `2^12 + 1` nodes.
    pub fn standard() -> Self {
        Self::simpson(-1.0, 1.0, DEFAULT_NODES).expect("valid grid")
    }

    /// Same interval, node count doubled (`2 (count - 1) + 1`).
    pub fn refined(&self) -> Self {
        let (a, b) = (self.nodes[0], *self.nodes.last().unwrap());
        Self::simpson(a, b, 2 * (self.nodes.len() - 1) + 1).expect("valid grid")
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, values: &[f64]) -> f64 {
        self.weights.iter().zip(values).map(|(w, v)| w * v).sum()
    }

    /// Weights `w_j` with `sum_j w_j g(t_j) ~ int g(t) e^{-i omega t} dt`.
    pub fn filon_weights(&self, omega: f64) -> Vec<Complex64> {
        let n = self.nodes.len();
        let h = self.half_panel;
        let mut w = vec![Complex64::new(0.0, 0.0); n];
        let [m0, m1, m2] = panel_moments(omega * h);
        // Moments of s^k e^{-i omega s} over [-h, h].
        let (mu0, mu1, mu2) = (m0 * h, m1 * (h * h), m2 * (h * h * h));
        let c_left = -mu1 / (2.0 * h) + mu2 / (2.0 * h * h);
        let c_mid = mu0 - mu2 / (h * h);
        let c_right = mu1 / (2.0 * h) + mu2 / (2.0 * h * h);
        let mut j = 0;
        while j + 2 < n {
            let (s, c) = (-omega * self.nodes[j + 1]).sin_cos();
            let phase = Complex64::new(c, s);
            w[j] += phase * c_left;
            w[j + 1] += phase * c_mid;
            w[j + 2] += phase * c_right;
            j += 2;
        }
        w
    }
}

/// `int_{-1}^{1} u^k e^{-i theta u} du` for `k = 0, 1, 2`.
fn panel_moments(theta: f64) -> [Complex64; 3] {
    if theta.abs() <= 1.0 {
        // sum_j (-i theta)^j / j! * 2 / (k + j + 1), over k + j even.
        let mut out = [Complex64::new(0.0, 0.0); 3];
        for (k, slot) in out.iter_mut().enumerate() {
            let mut coeff = Complex64::new(1.0, 0.0); // (-i theta)^j / j!
            for j in 0..40 {
                if j > 0 {
                    coeff *= Complex64::new(0.0, -theta) / j as f64;
                }
                if (k + j) % 2 == 0 {
                    let term = coeff * (2.0 / (k + j + 1) as f64);
                    *slot += term;
                    if term.norm() < 1e-18 {
                        break;
                    }
                }
            }
        }
        out
    } else {
        let (s, c) = theta.sin_cos();
        let t2 = theta * theta;
        [
            Complex64::new(2.0 * s / theta, 0.0),
            Complex64::new(0.0, -2.0 * (s - theta * c) / t2),
            Complex64::new(2.0 * ((t2 - 2.0) * s + 2.0 * theta * c) / (t2 * theta), 0.0),
        ]
    }
}

fn checked_real(z: Complex64) -> Result<f64> {
    if z.im.abs() > IMAG_TOL {
        return Err(Error::QuadratureImagResidue { residue: z.im });
    }
    Ok(z.re)
}

/// `m(P(t_j)^n 1)` at every node of `grid`.
pub fn charfn_on_grid(sys: &SymbolicSystem, obs: &Observable, grid: &QuadratureGrid, n: usize) -> Result<Vec<Complex64>> {
    let ones = spectral::ones(sys.dim());
    grid.nodes
        .iter()
        .map(|&t| Ok(char_operator(sys, obs, t)?.expectation_of_power(sys.stationary(), n, &ones)))
        .collect()
}

/// `m(f(S_n - x))` on the default grid.
pub fn expected_kernel_density<K: SmoothingKernel>(
    sys: &SymbolicSystem,
    obs: &Observable,
    kernel: &K,
    n: usize,
    x: f64,
) -> Result<f64> {
    let s = kernel.support();
    let grid = QuadratureGrid::simpson(-s, s, DEFAULT_NODES)?;
    expected_kernel_density_on(&grid, sys, obs, kernel, n, x)
}

pub fn expected_kernel_density_on<K: SmoothingKernel>(
    grid: &QuadratureGrid,
    sys: &SymbolicSystem,
    obs: &Observable,
    kernel: &K,
    n: usize,
    x: f64,
) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1"));
    }
    let c = charfn_on_grid(sys, obs, grid, n)?;
    let w = grid.filon_weights(x);
    let z: Complex64 = grid
        .nodes
        .iter()
        .zip(&c)
        .zip(&w)
        .map(|((&t, &cn), &wj)| wj * cn * kernel.fhat(t))
        .sum();
    checked_real(z)
}

/// `|lambda(t)|` sampled on `[-delta, delta]`, reusable across `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct LambdaModulus {
    pub delta: f64,
    grid: QuadratureGrid,
    modulus: Vec<f64>,
}

impl LambdaModulus {
    pub fn new(sys: &SymbolicSystem, obs: &Observable, delta: f64) -> Result<Self> {
        Self::with_nodes(sys, obs, delta, DEFAULT_NODES)
    }

    pub fn with_nodes(sys: &SymbolicSystem, obs: &Observable, delta: f64, nodes: usize) -> Result<Self> {
        if !(delta > 0.0) {
            return Err(Error::InvalidParameter("delta must be positive"));
        }
        let grid = QuadratureGrid::simpson(-delta, delta, nodes)?;
        let modulus = grid
            .nodes
            .iter()
            .map(|&t| Ok(spectral::eigen_at(sys, obs, t)?.lambda.norm()))
            .collect::<Result<Vec<_>>>()?;
        Ok(LambdaModulus { delta, grid, modulus })
    }

    /// `int_{-delta}^{delta} |lambda(t)|^n dt`.
    pub fn l1_norm(&self, n: usize) -> f64 {
        let vals: Vec<f64> = self.modulus.iter().map(|m| m.powi(n as i32)).collect();
        self.grid.integrate(&vals)
    }

    pub fn max_modulus(&self) -> f64 {
        self.modulus.iter().cloned().fold(0.0, f64::max)
    }
}

/// `int_{-delta}^{delta} |lambda(t)|^n dt`.
pub fn lambda_l1_norm(sys: &SymbolicSystem, obs: &Observable, n: usize, delta: f64) -> Result<f64> {
    Ok(LambdaModulus::new(sys, obs, delta)?.l1_norm(n))
}

/// Partial sums of `sum_n |m(f(S_n)) - m(f(S_n + y))|`.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialKernelSeries {
    pub y: f64,
    /// `terms[n - 1] = |int fhat(t) m(P(t)^n 1) (1 - e^{ity}) dt|`.
    pub terms: Vec<f64>,
    /// `partial_sums[n - 1] = terms[0] + ... + terms[n - 1]`.
    pub partial_sums: Vec<f64>,
}

impl PotentialKernelSeries {
    pub fn horizon(&self) -> usize {
        self.terms.len()
    }

    /// Sum up to the horizon.
    pub fn value(&self) -> f64 {
        self.partial_sums.last().copied().unwrap_or(0.0)
    }

    /// Partial sum through `n` (`0` for `n = 0`).
    pub fn sum_to(&self, n: usize) -> f64 {
        if n == 0 {
            0.0
        } else {
            self.partial_sums[n.min(self.terms.len()) - 1]
        }
    }

    /// Cauchy tail `S(horizon) - S(n0)`.
    pub fn tail_after(&self, n0: usize) -> f64 {
        self.value() - self.sum_to(n0)
    }

    /// Largest single increment with index `n > n0`.
    pub fn max_increment_after(&self, n0: usize) -> f64 {
        self.terms.iter().skip(n0).cloned().fold(0.0, f64::max)
    }
}

/// Potential-kernel partial sums up to `horizon` for every offset in `ys`,
/// sharing one pass over `n`.
pub fn potential_kernel_sums<K: SmoothingKernel>(
    sys: &SymbolicSystem,
    obs: &Observable,
    kernel: &K,
    ys: &[f64],
    horizon: usize,
) -> Result<Vec<PotentialKernelSeries>> {
    let s = kernel.support();
    let grid = QuadratureGrid::simpson(-s, s, DEFAULT_NODES)?;
    potential_kernel_sums_on(&grid, sys, obs, kernel, ys, horizon)
}

pub fn potential_kernel_sums_on<K: SmoothingKernel>(
    grid: &QuadratureGrid,
    sys: &SymbolicSystem,
    obs: &Observable,
    kernel: &K,
    ys: &[f64],
    horizon: usize,
) -> Result<Vec<PotentialKernelSeries>> {
    if horizon == 0 {
        return Err(Error::InvalidParameter("horizon must be at least 1"));
    }
    let d = sys.dim();
    let pi = sys.stationary();
    let ops: Vec<CharOperatorSample> = grid
        .nodes
        .iter()
        .map(|&t| char_operator(sys, obs, t))
        .collect::<Result<_>>()?;
    let fhat: Vec<f64> = grid.nodes.iter().map(|&t| kernel.fhat(t)).collect();
    // (1 - e^{ity}) weights: Simpson minus Filon at omega = -y, times fhat.
    let weights: Vec<Vec<Complex64>> = ys
        .iter()
        .map(|&y| {
            grid.filon_weights(-y)
                .iter()
                .zip(&grid.weights)
                .zip(&fhat)
                .map(|((&w, &s), &fh)| (Complex64::new(s, 0.0) - w) * fh)
                .collect()
        })
        .collect();

    let mut state: Vec<Vec<Complex64>> = vec![spectral::ones(d); grid.len()];
    let mut scratch = vec![Complex64::new(0.0, 0.0); d];
    let mut moments = vec![Complex64::new(0.0, 0.0); grid.len()];
    let mut out: Vec<PotentialKernelSeries> = ys
        .iter()
        .map(|&y| PotentialKernelSeries {
            y,
            terms: Vec::with_capacity(horizon),
            partial_sums: Vec::with_capacity(horizon),
        })
        .collect();
    for _ in 0..horizon {
        for ((op, v), mom) in ops.iter().zip(state.iter_mut()).zip(moments.iter_mut()) {
            op.matrix.apply_into(v, &mut scratch);
            v.copy_from_slice(&scratch);
            *mom = crate::linalg::weighted_sum(pi, v);
        }
        for (series, w) in out.iter_mut().zip(&weights) {
            let z: Complex64 = w.iter().zip(&moments).map(|(a, b)| a * b).sum();
            let term = checked_real(z)?.abs();
            let prev = series.partial_sums.last().copied().unwrap_or(0.0);
            series.terms.push(term);
            series.partial_sums.push(prev + term);
        }
    }
    Ok(out)
}

/// Single-offset convenience wrapper around [`potential_kernel_sums`].
pub fn potential_kernel_sum<K: SmoothingKernel>(
    sys: &SymbolicSystem,
    obs: &Observable,
    kernel: &K,
    y: f64,
    horizon: usize,
) -> Result<PotentialKernelSeries> {
    Ok(potential_kernel_sums(sys, obs, kernel, &[y], horizon)?.remove(0))
}

#[cfg(test)]
mod tests {
    use super::*;


    #[test]
    fn simpson_weights_sum_to_length() {
        let g = QuadratureGrid::standard();
        assert_eq!(g.len(), 4097);
        assert!((g.weights.iter().sum::<f64>() - 2.0).abs() < 1e-12);
        assert_eq!(g.nodes[2048], 0.0);
        assert!(QuadratureGrid::simpson(-1.0, 1.0, 4096).is_err());
    }

    #[test]
    fn filon_reduces_to_simpson_and_integrates_exponentials() {
        let g = QuadratureGrid::simpson(-1.0, 1.0, 65).unwrap();
        for (w, s) in g.filon_weights(0.0).iter().zip(&g.weights) {
            assert!((w.re - s).abs() < 1e-15 && w.im.abs() < 1e-15);
        }
        // int_{-1}^{1} (1 - |t|) e^{-i x t} dt = 2 (1 - cos x) / x^2, exact for
        // piecewise-linear data at any x.
        let fej = fejer_kernel();
        for &x in &[0.3, 7.0, 150.0, 1e6] {
            let w = g.filon_weights(x);
            let z: Complex64 = g.nodes.iter().zip(&w).map(|(&t, &wj)| wj * fej.fhat(t)).sum();
            assert!((z.re - fej.f(x)).abs() < 1e-13, "x = {x}: {} vs {}", z.re, fej.f(x));
            assert!(z.im.abs() < 1e-13);
        }
        // Smooth integrand: int_{-1}^{1} t^2 e^{-2it} dt.
        let w = g.filon_weights(2.0);
        let z: Complex64 = g.nodes.iter().zip(&w).map(|(&t, &wj)| wj * (t * t)).sum();
        let exact = (2.0 * 2.0f64.sin()) / 2.0 + 2.0 * (2.0f64.cos()) * 2.0 / 4.0 - 4.0 * 2.0f64.sin() / 8.0;
        assert!((z.re - exact).abs() < 1e-14, "{} vs {exact}", z.re);
    }

    #[test]
    fn panel_moment_branches_agree() {
        for theta in [0.999_999_9f64, -0.999_999_9] {
            let a = panel_moments(theta);
            let b = panel_moments(theta * (1.0 + 2e-7));
            for k in 0..3 {
                assert!((a[k] - b[k]).norm() < 1e-6);
            }
        }
    }
}

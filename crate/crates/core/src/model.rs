//! Subshifts of finite type carrying a stationary one-step Markov measure,
//! and the edge observables whose Birkhoff sums are studied.
//!
//! A system is described by its incidence matrix `A`, a row-stochastic
//! transition matrix `Q` supported on the allowed edges, and the stationary
//! vector `pi`. Observables are functions of an edge `(x, y)`, i.e. of two
//! consecutive symbols; state observables are edge observables that do not
//! depend on the second symbol.

use alloc::vec;
use alloc::vec::Vec;


use crate::linalg::{self, Square};
use crate::{Error, Result};

const ROW_SUM_TOL: f64 = 1e-12;
const STATIONARY_TOL: f64 = 1e-13;
const EIGEN_TOL: f64 = 1e-12;
const MAX_ITER: usize = 100_000;

/// Wielandt's bound: a primitive `d x d` matrix has `A^n > 0` for some
/// `n <= d^2 - 2d + 2`.
pub fn wielandt_bound(d: usize) -> usize {
    if d <= 1 {
        1
    } else {
        d * d - 2 * d + 2
    }
}

/// Least `n0` such that every entry of the boolean power `A^n0` is positive.
pub fn check_primitive(incidence: &Square<bool>) -> Result<usize> {
    let d = incidence.dim();
    if d == 0 {
        return Err(Error::InvalidParameter("empty alphabet"));
    }
    for s in 0..d {
        let has_succ = incidence.row(s).iter().any(|&a| a);
        let has_pred = (0..d).any(|r| incidence[(r, s)]);
        if !has_succ || !has_pred {
            return Err(Error::EmptyRowOrColumn { state: s });
        }
    }
    let bound = wielandt_bound(d);
    let mut power = incidence.clone();
    for n in 1..=bound {
        if power.as_slice().iter().all(|&a| a) {
            return Ok(n);
        }
        power = power.bool_matmul(incidence);
    }
    Err(Error::NotPrimitive { bound })
}

/// Support of a nonnegative matrix as an incidence matrix.
pub fn support(q: &Square<f64>) -> Square<bool> {
    q.map(|p| p > 0.0)
}

/// Stationary probability vector of a row-stochastic matrix with primitive
/// support. Solves `pi (I - Q) = 0, sum pi = 1` directly and polishes the
/// result with a few steps of `pi <- pi Q`.
pub fn stationary_distribution(q: &Square<f64>) -> Result<Vec<f64>> {
    check_primitive(&support(q))?;
    let d = q.dim();
    // Rows of the system are the equations (I - Q^T) pi = 0 with the last one
    // replaced by the normalization.
    let mut a = Square::from_fn(d, |i, j| if i == j { 1.0 } else { 0.0 } - q[(j, i)]);
    for j in 0..d {
        a[(d - 1, j)] = 1.0;
    }
    let mut rhs = vec![0.0; d];
    rhs[d - 1] = 1.0;
    let mut pi = linalg::solve(a, rhs).ok_or(Error::NotPrimitive {
        bound: wielandt_bound(d),
    })?;

    let mut residual = stationarity_residual(q, &pi);
    let mut iterations = 0;
    while residual > STATIONARY_TOL || iterations < 2 {
        if iterations >= MAX_ITER {
            return Err(Error::NonconvergentEigen { iterations, residual });
        }
        let next = q.apply_left(&pi);
        let total: f64 = next.iter().sum();
        pi = next.into_iter().map(|p| p / total).collect();
        residual = stationarity_residual(q, &pi);
        iterations += 1;
    }
    if pi.iter().any(|&p| p <= 0.0) {
        return Err(Error::NotPrimitive {
            bound: wielandt_bound(d),
        });
    }
    Ok(pi)
}

/// `max_y |(pi Q)_y - pi_y|`.
pub fn stationarity_residual(q: &Square<f64>, pi: &[f64]) -> f64 {
    q.apply_left(pi)
        .iter()
        .zip(pi)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

/// A one-step Markov measure on a primitive subshift of finite type.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolicSystem {
    incidence: Square<bool>,
    transition: Square<f64>,
    stationary: Vec<f64>,
    primitivity_index: usize,
}

impl SymbolicSystem {
    /// Validates `Q` against `A` and computes the stationary vector.
    ///
    /// Rows of `Q` must sum to one within `1e-12` and `Q` may only charge
    /// allowed edges. The support of `Q` must itself be primitive.
    pub fn new(incidence: Square<bool>, transition: Square<f64>) -> Result<Self> {
        let d = incidence.dim();
        if transition.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: transition.dim(),
            });
        }
        check_primitive(&incidence)?;
        for (row, r) in transition.rows().enumerate() {
            for (col, &p) in r.iter().enumerate() {
                if !p.is_finite() {
                    return Err(Error::NonFinite { row, col });
                }
                if !(0.0..=1.0).contains(&p) || (p > 0.0 && !incidence[(row, col)]) {
                    return Err(Error::BadTransition { row, col, value: p });
                }
            }
            let sum: f64 = r.iter().sum();
            if (sum - 1.0).abs() > ROW_SUM_TOL {
                return Err(Error::NotStochastic { row, sum });
            }
        }
        let primitivity_index = check_primitive(&support(&transition))?;
        let stationary = stationary_distribution(&transition)?;
        Ok(SymbolicSystem {
            incidence,
            transition,
            stationary,
            primitivity_index,
        })
    }

    /// A system whose incidence matrix is the support of `Q`.
    pub fn from_transition(transition: Square<f64>) -> Result<Self> {
        Self::new(support(&transition), transition)
    }

    /// The i.i.d. process with one-symbol law `pi`, i.e. every row of `Q`
    /// equal to `pi`.
    pub fn iid(pi: &[f64]) -> Result<Self> {
        let d = pi.len();
        Self::from_transition(Square::from_fn(d, |_, j| pi[j]))
    }

    pub fn dim(&self) -> usize {
        self.incidence.dim()
    }

    pub fn incidence(&self) -> &Square<bool> {
        &self.incidence
    }

    pub fn transition(&self) -> &Square<f64> {
        &self.transition
    }

    pub fn stationary(&self) -> &[f64] {
        &self.stationary
    }

    /// Least `n0` with `Q^n0 > 0` entrywise.
    pub fn primitivity_index(&self) -> usize {
        self.primitivity_index
    }

    /// Whether the measure charges the edge `(x, y)`.
    pub fn allows(&self, x: usize, y: usize) -> bool {
        self.transition[(x, y)] > 0.0
    }

    /// Stationary expectation of an edge function,
    /// `sum_{x,y} pi[x] Q[x][y] g[x][y]` over charged edges.
    pub fn edge_mean(&self, g: &Square<f64>) -> f64 {
        let d = self.dim();
        let mut acc = 0.0;
        for x in 0..d {
            for y in 0..d {
                if self.allows(x, y) {
                    acc += self.stationary[x] * self.transition[(x, y)] * g[(x, y)];
                }
            }
        }
        acc
    }
}

/// Real function of an edge `(x, y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Observable {
    values: Square<f64>,
    centered: bool,
}

impl Observable {
    /// Wraps a raw matrix without centering it.
    pub fn uncentered(values: Square<f64>) -> Self {
        Observable {
            values,
            centered: false,
        }
    }

    /// Edge matrix of a function of the first symbol only.
    pub fn state_values(g: &[f64]) -> Square<f64> {
        Square::from_fn(g.len(), |x, _| g[x])
    }

    pub fn values(&self) -> &Square<f64> {
        &self.values
    }

    pub fn is_centered(&self) -> bool {
        self.centered
    }

    #[inline]
    pub fn at(&self, x: usize, y: usize) -> f64 {
        self.values[(x, y)]
    }

    /// `c * self`; centering is preserved.
    pub fn scaled(&self, c: f64) -> Self {
        Observable {
            values: self.values.map(|v| c * v),
            centered: self.centered,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.values.as_slice().iter().all(|&v| v == 0.0)
    }
}

/// Subtracts the stationary mean from `raw` on charged edges. Entries on
/// edges the measure never visits are set to zero.
pub fn center_observable(sys: &SymbolicSystem, raw: &Square<f64>) -> Result<Observable> {
    let d = sys.dim();
    if raw.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: raw.dim(),
        });
    }
    for (row, r) in raw.rows().enumerate() {
        for (col, v) in r.iter().enumerate() {
            if sys.allows(row, col) && !v.is_finite() {
                return Err(Error::NonFinite { row, col });
            }
        }
    }
    let mean = sys.edge_mean(raw);
    let values = Square::from_fn(d, |x, y| {
        if sys.allows(x, y) {
            raw[(x, y)] - mean
        } else {
            0.0
        }
    });
    Ok(Observable {
        values,
        centered: true,
    })
}

/// Gibbs potential on 2-cylinders.
#[derive(Debug, Clone, PartialEq)]
pub struct Potential {
    values: Square<f64>,
}

impl Potential {
    pub fn new(values: Square<f64>) -> Result<Self> {
        Ok(Potential { values })
    }

    pub fn zero(dim: usize) -> Self {
        Potential {
            values: Square::zeros(dim),
        }
    }

    pub fn values(&self) -> &Square<f64> {
        &self.values
    }
}

/// Perron root and positive right eigenvector (max-normalized) of a
/// nonnegative matrix with primitive support.
pub fn perron_eigen(m: &Square<f64>) -> Result<(f64, Vec<f64>)> {
    let d = m.dim();
    let mut h = vec![1.0; d];
    let mut residual = f64::INFINITY;
    for _ in 0..MAX_ITER {
        let mh = m.apply(&h);
        let scale = mh.iter().cloned().fold(0.0, f64::max);
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::Overflow);
        }
        let next: Vec<f64> = mh.iter().map(|v| v / scale).collect();
        residual = next
            .iter()
            .zip(&h)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        h = next;
        if residual <= EIGEN_TOL {
            let mh = m.apply(&h);
            // Rayleigh-type quotient against the all-ones covector.
            let rho = mh.iter().sum::<f64>() / h.iter().sum::<f64>();
            return Ok((rho, h));
        }
    }
    Err(Error::NonconvergentEigen {
        iterations: MAX_ITER,
        residual,
    })
}

/// Markov measure realizing the Gibbs state of a 2-cylinder potential.
///
/// With `M[x][y] = A[x][y] exp(pot[x][y])`, Perron root `rho` and right
/// eigenvector `h`, the normalized kernel is
/// `Q[x][y] = M[x][y] h[y] / (rho h[x])`.
pub fn gibbs_from_potential(incidence: &Square<bool>, pot: &Potential) -> Result<SymbolicSystem> {
    let d = incidence.dim();
    if pot.values.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: pot.values.dim(),
        });
    }
    check_primitive(incidence)?;
    for x in 0..d {
        for y in 0..d {
            if incidence[(x, y)] && !pot.values[(x, y)].is_finite() {
                return Err(Error::NonFinite { row: x, col: y });
            }
        }
    }
    let m = Square::from_fn(d, |x, y| {
        if incidence[(x, y)] {
            pot.values[(x, y)].exp()
        } else {
            0.0
        }
    });
    let (rho, h) = perron_eigen(&m)?;
    let mut q = Square::from_fn(d, |x, y| m[(x, y)] * h[y] / (rho * h[x]));
    for x in 0..d {
        let sum: f64 = q.row(x).iter().sum();
        for y in 0..d {
            q[(x, y)] /= sum;
        }
    }
    SymbolicSystem::new(incidence.clone(), q)
}

/// Pressure `log rho` of the potential, the constant `P` in the Gibbs
/// cylinder bounds.
pub fn pressure(incidence: &Square<bool>, pot: &Potential) -> Result<f64> {
    let d = incidence.dim();
    let m = Square::from_fn(d, |x, y| {
        if incidence[(x, y)] {
            pot.values[(x, y)].exp()
        } else {
            0.0
        }
    });
    Ok(perron_eigen(&m)?.0.ln())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn incidence<const D: usize>(rows: [[u8; D]; D]) -> Square<bool> {
        Square::from_fn(D, |i, j| rows[i][j] != 0)
    }

    fn q<const D: usize>(rows: [[f64; D]; D]) -> Square<f64> {
        Square::from_rows(&rows).unwrap()
    }

    #[test]
    fn primitive_indices() {
        assert_eq!(check_primitive(&incidence([[1, 1], [1, 1]])), Ok(1));
        // A^2 = [[2,1],[1,1]]
        assert_eq!(check_primitive(&incidence([[1, 1], [1, 0]])), Ok(2));
        assert_eq!(
            check_primitive(&incidence([[0, 1], [1, 0]])),
            Err(Error::NotPrimitive { bound: 2 })
        );
        assert_eq!(
            check_primitive(&incidence([[1, 0], [1, 0]])),
            Err(Error::EmptyRowOrColumn { state: 1 })
        );
    }

    #[test]
    fn wielandt_bound_is_attained() {
        // The Wielandt matrix: cycle 0 -> 1 -> ... -> d-1 -> 0 plus d-1 -> 1.
        let d = 4;
        let a = Square::from_fn(d, |i, j| j == (i + 1) % d || (i == d - 1 && j == 1));
        assert_eq!(check_primitive(&a), Ok(wielandt_bound(d)));
    }

    #[test]
    fn stationary_examples() {
        let pi = stationary_distribution(&q([[0.5, 0.5], [0.5, 0.5]])).unwrap();
        assert!((pi[0] - 0.5).abs() < 1e-15 && (pi[1] - 0.5).abs() < 1e-15);

        let pi = stationary_distribution(&q([[0.9, 0.1], [0.5, 0.5]])).unwrap();
        assert!((pi[0] - 5.0 / 6.0).abs() < 1e-14);
        assert!((pi[1] - 1.0 / 6.0).abs() < 1e-14);

        assert!(matches!(
            stationary_distribution(&q([[1.0, 0.0], [0.0, 1.0]])),
            Err(Error::NotPrimitive { .. }) | Err(Error::EmptyRowOrColumn { .. })
        ));
    }

    #[test]
    fn system_validation() {
        let a = incidence([[1, 1], [1, 0]]);
        let err = SymbolicSystem::new(a.clone(), q([[0.5, 0.5], [0.5, 0.5]])).unwrap_err();
        assert!(matches!(err, Error::BadTransition { row: 1, col: 1, .. }));
        let err = SymbolicSystem::new(a, q([[0.5, 0.4], [1.0, 0.0]])).unwrap_err();
        assert!(matches!(err, Error::NotStochastic { row: 0, .. }));
    }

    #[test]
    fn uniform_gibbs_on_full_shift() {
        let d = 3;
        let sys = gibbs_from_potential(&Square::from_fn(d, |_, _| true), &Potential::zero(d)).unwrap();
        for &p in sys.transition().as_slice() {
            assert!((p - 1.0 / 3.0).abs() < 1e-14);
        }
    }

    #[test]
    fn parry_measure_golden_mean() {
        let golden = (1.0 + 5.0f64.sqrt()) / 2.0;
        let a = incidence([[1, 1], [1, 0]]);
        let pot = Potential::zero(2);
        assert!((pressure(&a, &pot).unwrap() - golden.ln()).abs() < 1e-12);
        let sys = gibbs_from_potential(&a, &pot).unwrap();
        // h = (rho, 1): Q = [[1/rho, 1/rho^2], [1, 0]], pi ~ (rho^2, 1).
        let t = sys.transition();
        assert!((t[(0, 0)] - 1.0 / golden).abs() < 1e-12);
        assert!((t[(0, 1)] - 1.0 / (golden * golden)).abs() < 1e-12);
        assert_eq!(t[(1, 0)], 1.0);
        assert_eq!(t[(1, 1)], 0.0);
        let norm = golden * golden + 1.0;
        assert!((sys.stationary()[0] - golden * golden / norm).abs() < 1e-12);
    }

    #[test]
    fn constant_potential_cancels() {
        let a = incidence([[1, 1, 0], [1, 0, 1], [1, 1, 1]]);
        let base = Square::from_rows(&[[0.3, -1.2, 0.0], [0.7, 0.0, 0.1], [-0.4, 0.2, 1.5]]).unwrap();
        let s0 = gibbs_from_potential(&a, &Potential::new(base.clone()).unwrap()).unwrap();
        let s1 = gibbs_from_potential(&a, &Potential::new(base.map(|v| v + 3.7)).unwrap()).unwrap();
        for (x, y) in s0.transition().as_slice().iter().zip(s1.transition().as_slice()) {
            assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn centering_examples() {
        let coin = SymbolicSystem::iid(&[0.5, 0.5]).unwrap();
        let obs = center_observable(&coin, &Square::from_fn(2, |_, _| 7.0)).unwrap();
        assert!(obs.values().as_slice().iter().all(|&v| v == 0.0));

        let raw = Observable::state_values(&[1.0, 0.0]);
        let obs = center_observable(&coin, &raw).unwrap();
        assert_eq!(obs.at(0, 0), 0.5);
        assert_eq!(obs.at(0, 1), 0.5);
        assert_eq!(obs.at(1, 0), -0.5);
        assert!(obs.is_centered());

        let again = center_observable(&coin, obs.values()).unwrap();
        for (a, b) in again.values().as_slice().iter().zip(obs.values().as_slice()) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn single_symbol_system() {
        let sys = SymbolicSystem::iid(&[1.0]).unwrap();
        assert_eq!(sys.stationary(), &[1.0]);
        let obs = center_observable(&sys, &Square::from_fn(1, |_, _| 2.5)).unwrap();
        assert!(obs.is_zero());
    }
}

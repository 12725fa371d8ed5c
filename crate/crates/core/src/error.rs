use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not primitive: no positive power up to {bound}")]
    NotPrimitive { bound: usize },
    #[error("state {state} has no successor or no predecessor")]
    EmptyRowOrColumn { state: usize },
    #[error("expected a {expected}x{expected} matrix, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("row {row} of the transition matrix sums to {sum}, not 1")]
    NotStochastic { row: usize, sum: f64 },
    #[error("transition ({row}, {col}) has probability {value} outside [0, 1] or on a forbidden edge")]
    BadTransition { row: usize, col: usize, value: f64 },
    #[error("entry ({row}, {col}) is not finite")]
    NonFinite { row: usize, col: usize },
    #[error("iteration did not converge within {iterations} steps (last change {residual:e})")]
    NonconvergentEigen { iterations: usize, residual: f64 },
    #[error("observable is not centered")]
    UncenteredObservable,
    #[error("path enumeration needs {paths} paths, above the limit of {limit}")]
    TooLarge { paths: f64, limit: f64 },
    #[error("matrix entries overflowed while squaring")]
    Overflow,
    #[error("invalid frequency grid: {0}")]
    InvalidGrid(&'static str),
    #[error("covariance series did not reach tolerance within {terms} terms")]
    NonconvergentSeries { terms: usize },
    #[error("quadrature left an imaginary residue of {residue:e}")]
    QuadratureImagResidue { residue: f64 },
    #[error("{found} samples supplied, at least {required} required")]
    TooFewSamples { found: usize, required: usize },
    #[error("limiting variance {v:e} is degenerate")]
    DegenerateVariance { v: f64 },
    #[error("observable looks lattice: spectral radius {max_rho} at t = {t}")]
    ProbableLattice { max_rho: f64, t: f64 },
    #[error("invalid window [{a}, {b}] with eps = {eps}")]
    InvalidWindow { a: f64, b: f64, eps: f64 },
    #[error("grid spacing {spacing} is coarser than delta/4 for delta = {delta}")]
    GridTooCoarse { spacing: f64, delta: f64 },
    #[error("dyadic grid must have 2^k + 1 points, got {len}")]
    BadGridSize { len: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
}

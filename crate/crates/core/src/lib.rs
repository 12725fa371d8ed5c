//! Spectral and statistical machinery for local-time limit theorems of
//! Birkhoff sums over finite-alphabet Markov shifts.
//!
//! The crate is `no_std` (it needs `alloc`). Everything here is a pure
//! function of its inputs: systems and observables are immutable once built,
//! and Monte-Carlo batches are driven through an [`Executor`] so callers with
//! a thread pool can parallelize them without changing any result.
//!
//! Layout:
//!
//! * [`model`]: subshifts of finite type, Markov/Gibbs measures, centered
//!   edge observables.
//! * [`spectral`]: the twisted transfer operators `P(t)`, their dominant
//!   eigendata, spectral radii and the limiting variance.
//! * [`kernel_quadrature`]: the Fejér smoothing kernel and Fourier-inversion
//!   quadrature for `m(f(S_n - x))` and the potential-kernel series.
//! * [`montecarlo`]: reproducible path sampling, scaled paths, local-time
//!   fields and occupation fractions.
//! * [`verify`]: goodness-of-fit tests and deterministic inequality checks.
//! * [`catalog`]: the shipped example systems.
#![no_std]

extern crate alloc;

pub mod catalog;
mod error;
pub mod kernel_quadrature;
pub mod linalg;
pub mod model;
pub mod montecarlo;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
pub use num_complex::Complex64;

pub use kernel_quadrature::{fejer_kernel, Fejer, QuadratureGrid, SmoothingKernel};
pub use model::{Observable, Potential, SymbolicSystem};
pub use montecarlo::{Executor, PathSample, Sequential, StreamKey};

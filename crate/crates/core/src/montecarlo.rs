//! Stationary trajectories and the path functionals built from them: the
//! Birkhoff sums `S_k`, the scaled path `omega_n(j/n) = S_j / sqrt n`, the
//! smoothed local time `l_n(x) = n^{-1/2} sum_{k=1}^n f(S_k - sqrt(n) x)`,
//! and occupation fractions.
//!
//! Randomness comes from keyed ChaCha streams: a path is a pure function of
//! `(master seed, stream index)`, so any batch can be split across workers
//! and reassembled in index order without changing a single bit.

use alloc::vec::Vec;
use core::ops::Bound;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::kernel_quadrature::SmoothingKernel;
use crate::model::{Observable, SymbolicSystem};
use crate::{Error, Result};

/// Runs an order-independent indexed map and returns results in index order.
pub trait Executor {
    fn map_indexed<T, F>(&self, len: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send;
}

/// In-thread executor.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl Executor for Sequential {
    fn map_indexed<T, F>(&self, len: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        (0..len).map(f).collect()
    }
}

/// Identifies one random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StreamKey {
    pub master: u64,
    pub stream: u64,
}

impl StreamKey {
    pub fn new(master: u64, stream: u64) -> Self {
        StreamKey { master, stream }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master);
        rng.set_stream(self.stream);
        rng
    }
}

/// Uniform double in `[0, 1)` from the top 53 bits.
#[inline]
pub fn uniform(rng: &mut impl RngCore) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Cumulative tables for inverse-CDF sampling from `pi` and the rows of `Q`.
#[derive(Debug, Clone)]
pub struct Sampler<'a> {
    sys: &'a SymbolicSystem,
    obs: &'a Observable,
    initial: Vec<f64>,
    rows: Vec<Vec<f64>>,
}

fn cumulative(p: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    let mut out: Vec<f64> = p
        .iter()
        .map(|&x| {
            acc += x;
            acc
        })
        .collect();
    // Rounding must never leave a gap at the top.
    if let Some(top) = p.iter().rposition(|&x| x > 0.0) {
        for v in &mut out[top..] {
            *v = f64::INFINITY;
        }
    }
    out
}

#[inline]
fn draw(cdf: &[f64], u: f64) -> usize {
    cdf.iter().position(|&c| u < c).unwrap_or(cdf.len() - 1)
}

impl<'a> Sampler<'a> {
    pub fn new(sys: &'a SymbolicSystem, obs: &'a Observable) -> Result<Self> {
        if obs.values().dim() != sys.dim() {
            return Err(Error::DimensionMismatch {
                expected: sys.dim(),
                found: obs.values().dim(),
            });
        }
        Ok(Sampler {
            sys,
            obs,
            initial: cumulative(sys.stationary()),
            rows: sys.transition().rows().map(cumulative).collect(),
        })
    }

    pub fn sample(&self, n: usize, key: StreamKey) -> PathSample {
        let mut rng = key.rng();
        let mut states = Vec::with_capacity(n + 1);
        let mut increments = Vec::with_capacity(n);
        let mut sums = Vec::with_capacity(n + 1);
        let mut x = draw(&self.initial, uniform(&mut rng));
        let mut s = 0.0;
        states.push(x);
        sums.push(0.0);
        for _ in 0..n {
            let y = draw(&self.rows[x], uniform(&mut rng));
            let inc = self.obs.at(x, y);
            s += inc;
            states.push(y);
            increments.push(inc);
            sums.push(s);
            x = y;
        }
        PathSample {
            key,
            states,
            increments,
            sums,
        }
    }

    /// `S_n` alone, without storing the path.
    pub fn endpoint(&self, n: usize, key: StreamKey) -> f64 {
        let mut rng = key.rng();
        let mut x = draw(&self.initial, uniform(&mut rng));
        let mut s = 0.0;
        for _ in 0..n {
            let y = draw(&self.rows[x], uniform(&mut rng));
            s += self.obs.at(x, y);
            x = y;
        }
        s
    }

    pub fn system(&self) -> &SymbolicSystem {
        self.sys
    }
}

/// A sampled trajectory with its Birkhoff sums.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSample {
    pub key: StreamKey,
    /// `x_0, ..., x_n`.
    pub states: Vec<usize>,
    /// `X_k = phi(x_{k-1}, x_k)` for `k = 1..=n`.
    pub increments: Vec<f64>,
    /// `S_0 = 0, S_1, ..., S_n`.
    pub sums: Vec<f64>,
}

impl PathSample {
    pub fn steps(&self) -> usize {
        self.increments.len()
    }

    fn sqrt_n(&self) -> f64 {
        (self.steps() as f64).sqrt()
    }
}

pub fn sample_path(sys: &SymbolicSystem, obs: &Observable, n: usize, key: StreamKey) -> Result<PathSample> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1"));
    }
    Ok(Sampler::new(sys, obs)?.sample(n, key))
}

/// `omega_n(j / n) = S_j / sqrt n` for `j = 0..=n`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledPath {
    pub n: usize,
    pub values: Vec<f64>,
}

impl ScaledPath {
    /// Value at time `t in [0, 1]`, i.e. `S_floor(nt) / sqrt n`.
    pub fn at(&self, t: f64) -> f64 {
        let j = ((t.clamp(0.0, 1.0)) * self.n as f64).floor() as usize;
        self.values[j.min(self.n)]
    }
}

pub fn scaled_path(p: &PathSample) -> ScaledPath {
    let root = p.sqrt_n();
    ScaledPath {
        n: p.steps(),
        values: p.sums.iter().map(|s| s / root).collect(),
    }
}

/// `l_n` sampled on a grid of locations.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalTimeField {
    pub n: usize,
    pub x_grid: Vec<f64>,
    pub values: Vec<f64>,
}

impl LocalTimeField {
    /// Trapezoid integral over the grid.
    pub fn trapezoid_mass(&self) -> f64 {
        self.x_grid
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(x, v)| 0.5 * (x[1] - x[0]) * (v[0] + v[1]))
            .sum()
    }
}

/// `l_n(x) = n^{-1/2} sum_{k=1}^n f(S_k - sqrt(n) x)`.
pub fn local_time_at<K: SmoothingKernel>(p: &PathSample, kernel: &K, x: f64) -> f64 {
    let root = p.sqrt_n();
    let shift = root * x;
    p.sums[1..].iter().map(|&s| kernel.f(s - shift)).sum::<f64>() / root
}

pub fn local_time_field<K: SmoothingKernel>(p: &PathSample, kernel: &K, x_grid: &[f64]) -> LocalTimeField {
    LocalTimeField {
        n: p.steps(),
        x_grid: x_grid.to_vec(),
        values: x_grid.iter().map(|&x| local_time_at(p, kernel, x)).collect(),
    }
}

/// `count` equally spaced points on `[lo, hi]`.
pub fn uniform_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => alloc::vec![lo],
        _ => UniformGrid::spanning(lo, hi, count).points(),
    }
}

/// `lo + j step` for `j = 0..count`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformGrid {
    pub lo: f64,
    pub step: f64,
    pub count: usize,
}

impl UniformGrid {
    /// `count >= 2` points from `lo` to `hi` inclusive.
    pub fn spanning(lo: f64, hi: f64, count: usize) -> Self {
        UniformGrid {
            lo,
            step: (hi - lo) / (count.max(2) - 1) as f64,
            count,
        }
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.count).map(|j| self.lo + j as f64 * self.step).collect()
    }
}

/// `l_n` on a uniform grid. Same values as [`local_time_field`] up to
/// rounding, but lets the kernel walk each summand along the grid.
pub fn local_time_on<K: SmoothingKernel>(p: &PathSample, kernel: &K, grid: &UniformGrid) -> LocalTimeField {
    let root = p.sqrt_n();
    let mut values = alloc::vec![0.0; grid.count];
    let du = -root * grid.step;
    for &s in &p.sums[1..] {
        kernel.accumulate_progression(s - root * grid.lo, du, &mut values);
    }
    for v in &mut values {
        *v /= root;
    }
    LocalTimeField {
        n: p.steps(),
        x_grid: grid.points(),
        values,
    }
}

/// 513 points on `[-4 sqrt v, 4 sqrt v]`.
pub fn default_x_grid(v: f64) -> UniformGrid {
    let r = 4.0 * v.sqrt();
    UniformGrid::spanning(-r, r, 513)
}

/// Margin added on both sides of the path range by [`mass_grid`].
pub const MASS_MARGIN: f64 = 40.0;

/// Grid covering `[min S_k / sqrt n - 40, max S_k / sqrt n + 40]`.
///
/// The spacing is `0.9 * 2 pi / sqrt n`. Each summand `x -> f(S_k - sqrt(n) x)`
/// is band-limited to frequencies `|w| <= sqrt n` (for a kernel with transform
/// supported in `[-1, 1]`), so by Poisson summation the trapezoid rule at
/// this spacing is exact on the whole line; only the truncated tails, of
/// relative size `2 / (40 pi sqrt n)` for the Fejér kernel, are lost.
pub fn mass_grid(p: &PathSample) -> UniformGrid {
    let root = p.sqrt_n();
    let (lo, hi) = p.sums[1..]
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &s| (lo.min(s), hi.max(s)));
    let (lo, hi) = (lo / root - MASS_MARGIN, hi / root + MASS_MARGIN);
    let step = 0.9 * 2.0 * core::f64::consts::PI / root;
    UniformGrid {
        lo,
        step,
        count: ((hi - lo) / step).ceil() as usize + 1,
    }
}

/// Number of `k in 1..=n` with `S_k / sqrt n` inside the given bounds.
pub fn occupation_count(p: &PathSample, lo: Bound<f64>, hi: Bound<f64>) -> usize {
    let root = p.sqrt_n();
    p.sums[1..]
        .iter()
        .filter(|&&s| {
            let z = s / root;
            let above = match lo {
                Bound::Included(a) => z >= a,
                Bound::Excluded(a) => z > a,
                Bound::Unbounded => true,
            };
            let below = match hi {
                Bound::Included(b) => z <= b,
                Bound::Excluded(b) => z < b,
                Bound::Unbounded => true,
            };
            above && below
        })
        .count()
}

/// Fraction of `k in 1..=n` with `S_k / sqrt n in [a, b]`.
pub fn occupation_fraction(p: &PathSample, a: f64, b: f64) -> f64 {
    occupation_count(p, Bound::Included(a), Bound::Included(b)) as f64 / p.steps() as f64
}

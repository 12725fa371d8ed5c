//! Statistical checks of the limit laws and deterministic checks of the
//! path inequalities behind them.
//!
//! Reference laws use the variance `v = -lambda''(0)` from
//! [`spectral::variance`]: `S_n / sqrt n` against `N(0, v)`, and `l_n(0)` (in
//! units of the kernel mass) against `|Z| / sqrt v`, the law at level 0 of
//! the local time up to time 1 of a Brownian motion with variance `v`
//! (Lévy's identity `L_1(0) = |B_1|` in law, then Brownian scaling).

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::kernel_quadrature::SmoothingKernel;
use crate::model::{Observable, SymbolicSystem};
use crate::montecarlo::{self, local_time_at, occupation_fraction, Executor, PathSample, Sampler, StreamKey, UniformGrid};
use crate::spectral::{self, LATTICE_THRESHOLD};
use crate::{Error, Result};

/// Asymptotic Kolmogorov quantile at the 1% level.
pub const KS_COEFF_1PCT: f64 = 1.628;
pub const MIN_KS_SAMPLES: usize = 20;
/// Variances below this are treated as a coboundary observable.
pub const DEGENERATE_VARIANCE: f64 = 1e-10;
/// Slack allowed in the deterministic path inequalities.
pub const FP_SLACK: f64 = 1e-10;

/// Frequencies scanned by the aperiodicity gate of
/// [`local_time_law_check`].
pub const GATE_T_LO: f64 = 0.05;
pub const GATE_T_HI: f64 = 8.0;
pub const GATE_STEP: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KSResult {
    pub statistic: f64,
    pub n_samples: usize,
    pub critical: f64,
    pub pass: bool,
}

/// One-sample Kolmogorov-Smirnov distance between the empirical law of
/// `samples` and a continuous CDF.
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> Result<KSResult> {
    let m = samples.len();
    if m < MIN_KS_SAMPLES {
        return Err(Error::TooFewSamples {
            found: m,
            required: MIN_KS_SAMPLES,
        });
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mf = m as f64;
    let statistic = sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            let above = (i + 1) as f64 / mf - f;
            let below = f - i as f64 / mf;
            above.max(below)
        })
        .fold(0.0, f64::max);
    let critical = KS_COEFF_1PCT / mf.sqrt();
    Ok(KSResult {
        statistic,
        n_samples: m,
        critical,
        pass: statistic <= critical,
    })
}

pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / core::f64::consts::SQRT_2)
}

/// CDF of `|Z| / sqrt v`.
pub fn half_normal_cdf(u: f64, v: f64) -> f64 {
    if u <= 0.0 {
        0.0
    } else {
        libm::erf(u * (v / 2.0).sqrt())
    }
}

/// `-lambda''(0)`, rejecting degenerate observables.
pub fn limit_variance(sys: &SymbolicSystem, obs: &Observable) -> Result<f64> {
    if obs.is_zero() {
        return Err(Error::DegenerateVariance { v: 0.0 });
    }
    let report = spectral::variance(sys, obs)?;
    if report.v_gk < DEGENERATE_VARIANCE || report.v_fd < DEGENERATE_VARIANCE {
        return Err(Error::DegenerateVariance { v: report.v_fd });
    }
    Ok(report.v_fd)
}

/// `S_n / sqrt n` over `m` independent streams `(seed, 0..m)`.
pub fn normalized_endpoints<E: Executor>(
    sys: &SymbolicSystem,
    obs: &Observable,
    n: usize,
    m: usize,
    seed: u64,
    exec: &E,
) -> Result<Vec<f64>> {
    let sampler = Sampler::new(sys, obs)?;
    let root = (n as f64).sqrt();
    Ok(exec.map_indexed(m, |i| sampler.endpoint(n, StreamKey::new(seed, i as u64)) / root))
}

/// KS test of `S_n / sqrt n` against `N(0, v)`.
pub fn clt_check<E: Executor>(
    sys: &SymbolicSystem,
    obs: &Observable,
    n: usize,
    m: usize,
    seed: u64,
    exec: &E,
) -> Result<KSResult> {
    let v = limit_variance(sys, obs)?;
    let samples = normalized_endpoints(sys, obs, n, m, seed, exec)?;
    let sd = v.sqrt();
    ks_statistic(&samples, |x| normal_cdf(x / sd))
}

/// Empirical versus exact characteristic function of `S_n / sqrt n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharfnComparison {
    pub t: f64,
    pub empirical: Complex64,
    /// `m(P(t / sqrt n)^n 1)`.
    pub exact: Complex64,
    pub std_err: f64,
}

impl CharfnComparison {
    pub fn z_score(&self) -> f64 {
        (self.empirical - self.exact).norm() / self.std_err
    }
}

pub fn charfn_agreement(
    sys: &SymbolicSystem,
    obs: &Observable,
    n: usize,
    normalized: &[f64],
    ts: &[f64],
) -> Result<Vec<CharfnComparison>> {
    let m = normalized.len() as f64;
    let root = (n as f64).sqrt();
    ts.iter()
        .map(|&t| {
            let empirical = normalized
                .iter()
                .map(|&z| {
                    let (s, c) = (t * z).sin_cos();
                    Complex64::new(c, s)
                })
                .sum::<Complex64>()
                / m;
            let exact = spectral::charfn_power(sys, obs, n, t / root)?;
            let var = (1.0 - empirical.norm_sqr()).max(0.0);
            Ok(CharfnComparison {
                t,
                empirical,
                exact,
                std_err: (var / m).sqrt().max(f64::MIN_POSITIVE),
            })
        })
        .collect()
}

/// Rejects observables whose characteristic operators come within `1e-8`
/// of the unit circle on `+-[0.05, 8]`. Returns the refined peak.
pub fn aperiodicity_gate(sys: &SymbolicSystem, obs: &Observable) -> Result<(f64, f64)> {
    let scan = spectral::aperiodicity_scan(sys, obs, GATE_T_LO, GATE_T_HI, GATE_STEP)?;
    let (mut t, mut rho) = (scan.argmax_t, scan.max_rho);
    // Refine interior peaks only; an edge maximum is the near-zero slope.
    if scan.argmax_t.abs() - GATE_STEP >= GATE_T_LO {
        let (rt, rr) = spectral::refine_peak(sys, obs, scan.argmax_t, GATE_STEP)?;
        if rr >= rho {
            (t, rho) = (rt, rr);
        }
    }
    if rho >= LATTICE_THRESHOLD {
        return Err(Error::ProbableLattice { max_rho: rho, t });
    }
    Ok((t, rho))
}

/// `l_n(0) / mass` over `m` streams.
pub fn local_time_at_zero<E: Executor, K: SmoothingKernel + Sync>(
    sys: &SymbolicSystem,
    obs: &Observable,
    kernel: &K,
    n: usize,
    m: usize,
    seed: u64,
    exec: &E,
) -> Result<Vec<f64>> {
    let sampler = Sampler::new(sys, obs)?;
    let mass = kernel.mass();
    Ok(exec.map_indexed(m, |i| {
        let p = sampler.sample(n, StreamKey::new(seed, i as u64));
        local_time_at(&p, kernel, 0.0) / mass
    }))
}

/// KS test of `l_n(0) / mass` against `|Z| / sqrt v`, after the
/// aperiodicity gate.
pub fn local_time_law_check<E: Executor, K: SmoothingKernel + Sync>(
    sys: &SymbolicSystem,
    obs: &Observable,
    kernel: &K,
    n: usize,
    m: usize,
    seed: u64,
    exec: &E,
) -> Result<KSResult> {
    let v = limit_variance(sys, obs)?;
    aperiodicity_gate(sys, obs)?;
    let samples = local_time_at_zero(sys, obs, kernel, n, m, seed, exec)?;
    ks_statistic(&samples, |u| half_normal_cdf(u, v))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SandwichReport {
    pub n: usize,
    pub a: f64,
    pub b: f64,
    pub eps: f64,
    /// `int_a^b l_n(x) dx`.
    pub integral: f64,
    /// `occ[a - eps, b + eps] * mass + int_{sqrt(n) eps}^inf f`.
    pub upper_bound: f64,
    /// `occ[a + eps, b - eps] * int_{-sqrt(n) eps}^{sqrt(n) eps} f`; zero when
    /// the shrunken window is empty.
    pub lower_bound: f64,
    pub lower_vacuous: bool,
    pub lower_ok: bool,
    pub upper_ok: bool,
    pub slack_lower: f64,
    pub slack_upper: f64,
}

/// `int_a^b l_n(x) dx`, exactly, through the kernel's primitive.
pub fn local_time_integral<K: SmoothingKernel>(p: &PathSample, kernel: &K, a: f64, b: f64) -> f64 {
    let n = p.steps() as f64;
    let root = n.sqrt();
    p.sums[1..]
        .iter()
        .map(|&s| kernel.primitive(root * b - s) - kernel.primitive(root * a - s))
        .sum::<f64>()
        / n
}

/// Checks both occupation-measure inequalities on one path. They hold
/// deterministically whenever `f >= 0`.
pub fn occupation_sandwich<K: SmoothingKernel>(p: &PathSample, kernel: &K, a: f64, b: f64, eps: f64) -> Result<SandwichReport> {
    if !(a < b) || !(eps > 0.0) {
        return Err(Error::InvalidWindow { a, b, eps });
    }
    let n = p.steps();
    let u = (n as f64).sqrt() * eps;
    let integral = local_time_integral(p, kernel, a, b);
    let upper_bound = occupation_fraction(p, a - eps, b + eps) * kernel.mass() + kernel.tail_mass(u);
    let lower_vacuous = a + eps > b - eps;
    let lower_bound = if lower_vacuous {
        0.0
    } else {
        occupation_fraction(p, a + eps, b - eps) * kernel.window_mass(u)
    };
    let slack_upper = upper_bound - integral;
    let slack_lower = integral - lower_bound;
    Ok(SandwichReport {
        n,
        a,
        b,
        eps,
        integral,
        upper_bound,
        lower_bound,
        lower_vacuous,
        lower_ok: slack_lower >= -FP_SLACK,
        upper_ok: slack_upper >= -FP_SLACK,
        slack_lower,
        slack_upper,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentRatioReport {
    pub n_list: Vec<usize>,
    pub offsets: Vec<f64>,
    /// `ratios[i][j] = m((l_n(x) - l_n(x + off_j))^4) / off_j^2` at `n_list[i]`.
    pub ratios: Vec<Vec<f64>>,
    /// `m(l_n(x)^2)` at each `n`.
    pub second_moments: Vec<f64>,
    pub max_over_median: f64,
}

impl MomentRatioReport {
    /// `max / min` of the second moments across `n`.
    pub fn second_moment_spread(&self) -> f64 {
        let max = self.second_moments.iter().cloned().fold(0.0, f64::max);
        let min = self.second_moments.iter().cloned().fold(f64::INFINITY, f64::min);
        max / min
    }
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let k = v.len();
    if k == 0 {
        f64::NAN
    } else if k % 2 == 1 {
        v[k / 2]
    } else {
        0.5 * (v[k / 2 - 1] + v[k / 2])
    }
}

/// Monte-Carlo fourth-moment and second-moment tables for `l_n`.
#[allow(clippy::too_many_arguments)]
pub fn moment_ratio_scan<E: Executor, K: SmoothingKernel + Sync>(
    sys: &SymbolicSystem,
    obs: &Observable,
    kernel: &K,
    n_list: &[usize],
    x: f64,
    offsets: &[f64],
    m: usize,
    seed: u64,
    exec: &E,
) -> Result<MomentRatioReport> {
    if m < MIN_KS_SAMPLES {
        return Err(Error::TooFewSamples {
            found: m,
            required: MIN_KS_SAMPLES,
        });
    }
    if offsets.iter().any(|&o| !(o > 0.0)) {
        return Err(Error::InvalidParameter("offsets must be positive"));
    }
    if n_list.iter().any(|&n| n == 0) {
        return Err(Error::InvalidParameter("n must be at least 1"));
    }
    let sampler = Sampler::new(sys, obs)?;
    let mut ratios = Vec::with_capacity(n_list.len());
    let mut second_moments = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let rows: Vec<(f64, Vec<f64>)> = exec.map_indexed(m, |i| {
            let p = sampler.sample(n, StreamKey::new(seed, i as u64));
            let base = local_time_at(&p, kernel, x);
            let diffs = offsets
                .iter()
                .map(|&o| {
                    let d = base - local_time_at(&p, kernel, x + o);
                    d * d * d * d
                })
                .collect();
            (base * base, diffs)
        });
        let mf = m as f64;
        second_moments.push(rows.iter().map(|r| r.0).sum::<f64>() / mf);
        ratios.push(
            offsets
                .iter()
                .enumerate()
                .map(|(j, &o)| rows.iter().map(|r| r.1[j]).sum::<f64>() / mf / (o * o))
                .collect(),
        );
    }
    let flat: Vec<f64> = ratios.iter().flatten().cloned().collect();
    let max = flat.iter().cloned().fold(0.0, f64::max);
    Ok(MomentRatioReport {
        n_list: n_list.to_vec(),
        offsets: offsets.to_vec(),
        ratios,
        second_moments,
        max_over_median: max / median(&flat),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModulusPoint {
    pub delta: f64,
    /// Fraction of paths with `sup_{|x-y|<delta} |l_n(x) - l_n(y)| >= eps`.
    pub probability: f64,
    pub std_err: f64,
}

/// Largest `|v_j - v_i|` over grid pairs with `x_j - x_i < delta`.
pub fn oscillation(x_grid: &[f64], values: &[f64], delta: f64) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..x_grid.len() {
        for j in i + 1..x_grid.len() {
            if x_grid[j] - x_grid[i] >= delta {
                break;
            }
            worst = worst.max((values[j] - values[i]).abs());
        }
    }
    worst
}

/// Empirical probability that the modulus of continuity of `l_n` on
/// `[-2 sqrt v, 2 sqrt v]` reaches `eps`, for each `delta`.
#[allow(clippy::too_many_arguments)]
pub fn modulus_probe<E: Executor, K: SmoothingKernel + Sync>(
    sys: &SymbolicSystem,
    obs: &Observable,
    kernel: &K,
    n: usize,
    deltas: &[f64],
    eps: f64,
    m: usize,
    seed: u64,
    grid_points: usize,
    exec: &E,
) -> Result<Vec<ModulusPoint>> {
    if deltas.is_empty() || deltas.windows(2).any(|w| w[1] >= w[0]) || deltas.iter().any(|&d| !(d > 0.0)) {
        return Err(Error::InvalidParameter("deltas must be positive and decreasing"));
    }
    if m == 0 || grid_points < 2 {
        return Err(Error::InvalidParameter("need samples and at least two grid points"));
    }
    let v = limit_variance(sys, obs)?;
    let h = 2.0 * v.sqrt();
    let grid = UniformGrid::spanning(-h, h, grid_points);
    let spacing = grid.step;
    for &delta in deltas {
        if spacing > delta / 4.0 {
            return Err(Error::GridTooCoarse { spacing, delta });
        }
    }
    let sampler = Sampler::new(sys, obs)?;
    let hits: Vec<Vec<bool>> = exec.map_indexed(m, |i| {
        let p = sampler.sample(n, StreamKey::new(seed, i as u64));
        let field = montecarlo::local_time_on(&p, kernel, &grid);
        deltas
            .iter()
            .map(|&d| oscillation(&field.x_grid, &field.values, d) >= eps)
            .collect()
    });
    let mf = m as f64;
    Ok(deltas
        .iter()
        .enumerate()
        .map(|(j, &delta)| {
            let probability = hits.iter().filter(|h| h[j]).count() as f64 / mf;
            ModulusPoint {
                delta,
                probability,
                std_err: (probability * (1.0 - probability) / mf).sqrt(),
            }
        })
        .collect())
}

/// Chebyshev bound `P(l_n(x) >= a) <= m(l_n(x)^2) / a^2`.
pub fn chebyshev_tail(second_moment: f64, a: f64) -> f64 {
    (second_moment / (a * a)).min(1.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainingReport {
    /// `B_k`, the largest pairwise difference on the finest level.
    pub sup_pairwise: f64,
    /// `2 sum_i A_i`.
    pub bound: f64,
    /// `A_0, ..., A_k`: largest adjacent increment per dyadic level.
    pub increments: Vec<f64>,
    pub holds: bool,
}

/// The dyadic chaining inequality `B_k <= 2 sum_{i=0}^k A_i` for values on a
/// grid of `2^k + 1` points.
pub fn dyadic_chaining_check(values: &[f64]) -> Result<ChainingReport> {
    let len = values.len();
    if len < 2 || !(len - 1).is_power_of_two() {
        return Err(Error::BadGridSize { len });
    }
    let k = (len - 1).trailing_zeros() as usize;
    let increments: Vec<f64> = (0..=k)
        .map(|level| {
            let stride = 1usize << (k - level);
            (0..len - 1)
                .step_by(stride)
                .map(|j| (values[j + stride] - values[j]).abs())
                .fold(0.0, f64::max)
        })
        .collect();
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let sup_pairwise = max - min;
    let bound = 2.0 * increments.iter().sum::<f64>();
    Ok(ChainingReport {
        sup_pairwise,
        bound,
        holds: sup_pairwise <= bound,
        increments,
    })
}

/// `d(f, g) = sum_{k>=1} 2^{-k} min(1, sup_{|x| <= k} |f(x) - g(x)|)` with
/// the sups taken over grid points, the metric of local uniform convergence.
pub fn local_uniform_metric(x_grid: &[f64], f: &[f64], g: &[f64]) -> f64 {
    let extent = x_grid.iter().map(|x| x.abs()).fold(0.0, f64::max);
    let last = (extent.ceil() as usize).max(1);
    let mut sups = vec![0.0f64; last + 1];
    for ((&x, a), b) in x_grid.iter().zip(f).zip(g) {
        let k = (x.abs().ceil() as usize).max(1);
        sups[k] = sups[k].max((a - b).abs());
    }
    let mut total = 0.0;
    let mut running = 0.0f64;
    for (k, s) in sups.iter().enumerate().skip(1) {
        running = running.max(*s);
        let term = running.min(1.0);
        if k == last {
            // Every k >= last sees the whole grid: geometric tail.
            total += 2.0 * 0.5f64.powi(k as i32) * term;
        } else {
            total += 0.5f64.powi(k as i32) * term;
        }
    }
    total
}

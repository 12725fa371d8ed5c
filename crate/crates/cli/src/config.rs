//! TOML run configuration.
//!
//! ```toml
//! name = "two-state"
//!
//! [system]
//! alphabet = 2
//! transition = [[0.9, 0.1], [0.5, 0.5]]   # or: incidence + potential
//! observable = [1.0, -1.0]                # per-state values, or a d x d edge matrix
//! center = true
//!
//! [kernel]
//! name = "fejer"
//!
//! [run]
//! n = 10000
//! samples = 1000
//! seed = 1
//! out = "out/two-state"
//!
//! [grids]
//! t_lo = 0.05
//! t_hi = 1.0
//! t_step = 0.01
//! ```
//!
//! Everything under `[grids]` and `[kernel]` has defaults; `seed` is required.

use std::path::PathBuf;

use serde::Deserialize;

use loctime_core::linalg::Square;
use loctime_core::model::{center_observable, gibbs_from_potential, support};
use loctime_core::{Observable, Potential, SymbolicSystem};

use crate::error::{CliError, Result};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    name: Option<String>,
    system: RawSystem,
    #[serde(default)]
    kernel: RawKernel,
    run: RawRun,
    #[serde(default)]
    grids: Grids,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSystem {
    alphabet: usize,
    incidence: Option<Vec<Vec<u8>>>,
    transition: Option<Vec<Vec<f64>>>,
    potential: Option<Vec<Vec<f64>>>,
    observable: RawObservable,
    #[serde(default = "yes")]
    center: bool,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawObservable {
    States(Vec<f64>),
    Edges(Vec<Vec<f64>>),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawKernel {
    name: String,
}

impl Default for RawKernel {
    fn default() -> Self {
        RawKernel { name: "fejer".into() }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRun {
    #[serde(default = "default_n")]
    n: usize,
    #[serde(default = "default_samples")]
    samples: usize,
    seed: u64,
    #[serde(default = "default_out")]
    out: PathBuf,
}

fn yes() -> bool {
    true
}
fn default_n() -> usize {
    10_000
}
fn default_samples() -> usize {
    1000
}
fn default_out() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelChoice {
    Fejer,
}

/// Sweep and probe grids. All fields have defaults.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Grids {
    /// Frequency scan `[t_lo, t_hi]` (both signs) with spacing `t_step`.
    pub t_lo: f64,
    pub t_hi: f64,
    pub t_step: f64,
    /// Local-time grid `[-w, w]`; `w` defaults to `4 sqrt v`.
    pub x_half_width: Option<f64>,
    pub x_points: usize,
    /// Modulus-of-continuity probe: decreasing `delta`s and threshold.
    pub deltas: Vec<f64>,
    pub eps: f64,
    /// Defaults to the coarsest grid with spacing `<= min(delta) / 4`.
    pub modulus_points: Option<usize>,
    /// Potential-kernel offsets and horizon.
    pub ys: Vec<f64>,
    pub horizon: usize,
    /// Fourth-moment offsets and path lengths.
    pub offsets: Vec<f64>,
    pub n_list: Vec<usize>,
    /// Path lengths of the local-limit sweep.
    pub llt_n: Vec<usize>,
    /// Paths used by the per-path checks (mass, sandwich).
    pub paths: usize,
}

impl Default for Grids {
    fn default() -> Self {
        Grids {
            t_lo: 0.05,
            t_hi: 1.0,
            t_step: 0.01,
            x_half_width: None,
            x_points: 513,
            deltas: vec![0.4, 0.2, 0.1, 0.05],
            eps: 0.5,
            modulus_points: None,
            ys: (1..=10).map(|i| i as f64 / 10.0).collect(),
            horizon: 10_000,
            offsets: vec![0.05, 0.1, 0.2, 0.3, 0.4, 0.5],
            n_list: vec![100, 1000, 10_000],
            llt_n: (4..=14).map(|j| 1usize << j).collect(),
            paths: 100,
        }
    }
}

/// A validated run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub name: String,
    pub system: SymbolicSystem,
    pub observable: Observable,
    pub kernel: KernelChoice,
    pub n: usize,
    pub samples: usize,
    pub seed: u64,
    pub out: PathBuf,
    pub grids: Grids,
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

fn square(field: &str, rows: &[Vec<f64>], d: usize) -> Result<Square<f64>> {
    if rows.len() != d {
        return Err(CliError::Validation(format!("{field} must have {d} rows, found {}", rows.len())));
    }
    if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != d) {
        return Err(CliError::Validation(format!(
            "{field} row {i} must have {d} entries, found {}",
            r.len()
        )));
    }
    Ok(Square::from_fn(d, |x, y| rows[x][y]))
}

fn invalid(field: &str, e: loctime_core::Error) -> CliError {
    CliError::Validation(format!("{field}: {e}"))
}

pub fn parse_config(text: &str) -> Result<RunConfig> {
    let de = toml::Deserializer::new(text);
    let raw: RawConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        CliError::Parse {
            line: inner.span().map(|s| line_of(text, s.start)),
            field: (path != ".").then_some(path),
            message: inner.message().to_string(),
        }
    })?;
    validate(raw)
}

fn validate(raw: RawConfig) -> Result<RunConfig> {
    let s = raw.system;
    let d = s.alphabet;
    if d == 0 {
        return Err(CliError::Validation("system.alphabet must be at least 1".into()));
    }
    let incidence = match &s.incidence {
        Some(rows) => {
            let m = square("system.incidence", &rows.iter().map(|r| r.iter().map(|&v| v as f64).collect()).collect::<Vec<_>>(), d)?;
            if let Some(v) = m.as_slice().iter().find(|&&v| v != 0.0 && v != 1.0) {
                return Err(CliError::Validation(format!("system.incidence entries must be 0 or 1, found {v}")));
            }
            Some(m.map(|v| v == 1.0))
        }
        None => None,
    };
    let system = match (&s.transition, &s.potential) {
        (Some(_), Some(_)) => {
            return Err(CliError::Validation(
                "system.transition and system.potential are mutually exclusive".into(),
            ))
        }
        (None, None) => {
            return Err(CliError::Validation(
                "exactly one of system.transition or system.potential is required".into(),
            ))
        }
        (Some(q), None) => {
            let q = square("system.transition", q, d)?;
            let a = incidence.unwrap_or_else(|| support(&q));
            SymbolicSystem::new(a, q).map_err(|e| invalid("system.transition", e))?
        }
        (None, Some(p)) => {
            let p = square("system.potential", p, d)?;
            let a = incidence.unwrap_or_else(|| Square::from_fn(d, |_, _| true));
            let pot = Potential::new(p).map_err(|e| invalid("system.potential", e))?;
            gibbs_from_potential(&a, &pot).map_err(|e| invalid("system.potential", e))?
        }
    };
    let raw_obs = match &s.observable {
        RawObservable::States(g) => {
            if g.len() != d {
                return Err(CliError::Validation(format!(
                    "system.observable must have {d} state values, found {}",
                    g.len()
                )));
            }
            Observable::state_values(g)
        }
        RawObservable::Edges(rows) => square("system.observable", rows, d)?,
    };
    let observable = if s.center {
        center_observable(&system, &raw_obs).map_err(|e| invalid("system.observable", e))?
    } else {
        let obs = Observable::uncentered(raw_obs);
        let mean = system.edge_mean(obs.values());
        if mean.abs() > 1e-12 {
            return Err(CliError::Validation(format!(
                "system.observable has mean {mean:e}; set center = true or supply a centered observable"
            )));
        }
        center_observable(&system, obs.values()).map_err(|e| invalid("system.observable", e))?
    };

    let kernel = match raw.kernel.name.as_str() {
        "fejer" => KernelChoice::Fejer,
        other => return Err(CliError::Validation(format!("kernel.name `{other}` is not known (available: fejer)"))),
    };
    let g = &raw.grids;
    let check = |ok: bool, msg: &str| if ok { Ok(()) } else { Err(CliError::Validation(msg.into())) };
    check(raw.run.n >= 1, "run.n must be at least 1")?;
    check(g.t_step > 0.0 && g.t_lo >= 0.0 && g.t_lo <= g.t_hi, "grids: need 0 <= t_lo <= t_hi and t_step > 0")?;
    check(g.x_points >= 2, "grids.x_points must be at least 2")?;
    check(g.x_half_width.is_none_or(|w| w > 0.0), "grids.x_half_width must be positive")?;
    check(
        !g.deltas.is_empty() && g.deltas.iter().all(|&x| x > 0.0) && g.deltas.windows(2).all(|w| w[1] < w[0]),
        "grids.deltas must be positive and strictly decreasing",
    )?;
    check(g.eps >= 0.0, "grids.eps must be nonnegative")?;
    check(g.ys.iter().all(|y| y.is_finite()) && g.horizon >= 1, "grids: ys must be finite and horizon >= 1")?;
    check(g.offsets.iter().all(|&o| o > 0.0), "grids.offsets must be positive")?;
    check(g.n_list.iter().all(|&n| n >= 1), "grids.n_list entries must be at least 1")?;
    check(g.llt_n.iter().all(|&n| n >= 1), "grids.llt_n entries must be at least 1")?;

    Ok(RunConfig {
        name: raw.name.unwrap_or_else(|| "system".into()),
        system,
        observable,
        kernel,
        n: raw.run.n,
        samples: raw.run.samples,
        seed: raw.run.seed,
        out: raw.run.out,
        grids: raw.grids,
    })
}

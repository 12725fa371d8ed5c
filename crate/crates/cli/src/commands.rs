//! Subcommands. Each returns the tables and verdicts it produced; writing
//! them is left to the caller, so every file write happens in one place.

use std::f64::consts::PI;

use clap::ValueEnum;
use serde_json::json;

use loctime_core::kernel_quadrature::{expected_kernel_density, potential_kernel_sums, LambdaModulus};
use loctime_core::montecarlo::{local_time_on, mass_grid, sample_path, scaled_path, Sampler, UniformGrid};
use loctime_core::spectral::{self, eigen_at, spectral_radius};
use loctime_core::verify::{self, dyadic_chaining_check, occupation_sandwich};
use loctime_core::{fejer_kernel, Executor, Fejer, SmoothingKernel, StreamKey};

use crate::config::{KernelChoice, RunConfig};
use crate::error::Result;
use crate::exec::Rayon;
use crate::output::{num, Table, Verdict};
use crate::suite::{self, SuiteOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Spectrum,
    ScanAperiodicity,
    Variance,
    Llt,
    PotentialKernel,
    Simulate,
    Localtime,
    VerifyClt,
    VerifyLocaltime,
    VerifyMoments,
    VerifyTightness,
    Report,
}

/// What a subcommand produced.
#[derive(Debug, Default)]
pub struct Outcome {
    pub tables: Vec<Table>,
    pub verdicts: Vec<Verdict>,
    pub summary: String,
}

fn kernel(cfg: &RunConfig) -> Fejer {
    match cfg.kernel {
        KernelChoice::Fejer => fejer_kernel(),
    }
}

fn int(x: impl ToString) -> String {
    x.to_string()
}

pub fn run(cmd: Command, cfg: &RunConfig, exec: &Rayon) -> Result<Outcome> {
    match cmd {
        Command::Spectrum => spectrum(cfg),
        Command::ScanAperiodicity => scan_aperiodicity(cfg),
        Command::Variance => variance(cfg),
        Command::Llt => llt(cfg),
        Command::PotentialKernel => potential_kernel(cfg),
        Command::Simulate => simulate(cfg),
        Command::Localtime => localtime(cfg, exec),
        Command::VerifyClt => verify_clt(cfg, exec),
        Command::VerifyLocaltime => verify_localtime(cfg, exec),
        Command::VerifyMoments => verify_moments(cfg, exec),
        Command::VerifyTightness => verify_tightness(cfg, exec),
        Command::Report => report(cfg.seed, exec),
    }
}

/// `[-t_hi, t_hi]` with step `t_step`, through zero.
fn symmetric_grid(t_hi: f64, step: f64) -> Vec<f64> {
    let k = (t_hi / step + 1e-9).floor() as i64;
    (-k..=k).map(|j| j as f64 * step).collect()
}

fn spectrum(cfg: &RunConfig) -> Result<Outcome> {
    let (sys, obs) = (&cfg.system, &cfg.observable);
    let mut t = Table::new(
        "spectrum",
        &["t", "lambda_re", "lambda_im", "lambda_abs", "gap_ratio", "spectral_radius"],
    );
    let grid = symmetric_grid(cfg.grids.t_hi, cfg.grids.t_step);
    let mut conj = 0.0f64;
    for &s in &grid {
        let op = spectral::char_operator(sys, obs, s)?;
        let e = spectral::dominant_eigen(&op, sys.stationary())?;
        let rho = spectral_radius(&op.matrix)?;
        if s > 0.0 {
            conj = conj.max((eigen_at(sys, obs, -s)?.lambda - e.lambda.conj()).norm());
        }
        t.push(vec![num(s), num(e.lambda.re), num(e.lambda.im), num(e.lambda.norm()), num(e.gap_ratio), num(rho)]);
    }
    let e0 = eigen_at(sys, obs, 0.0)?;
    let resid = (e0.lambda - 1.0)
        .norm()
        .max(e0.eta.iter().map(|z| (z - 1.0).norm()).fold(0.0, f64::max));
    Ok(Outcome {
        tables: vec![t],
        verdicts: vec![
            Verdict::at_most("spectrum.unit_eigen_at_zero", json!({}), resid, 1e-12),
            Verdict::at_most("spectrum.conjugation_defect", json!({"t_hi": cfg.grids.t_hi}), conj, 1e-10),
        ],
        summary: String::new(),
    })
}

fn scan_aperiodicity(cfg: &RunConfig) -> Result<Outcome> {
    let g = &cfg.grids;
    let (sys, obs) = (&cfg.system, &cfg.observable);
    let scan = spectral::aperiodicity_scan(sys, obs, g.t_lo, g.t_hi, g.t_step)?;
    let (mut t_star, mut rho) = (scan.argmax_t, scan.max_rho);
    if scan.argmax_t.abs() - g.t_step >= g.t_lo {
        let (rt, rr) = spectral::refine_peak(sys, obs, scan.argmax_t, g.t_step)?;
        if rr >= rho {
            (t_star, rho) = (rt, rr);
        }
    }
    let mut t = Table::new("scan", &["t", "rho"]);
    for &(s, r) in &scan.samples {
        t.push(vec![num(s), num(r)]);
    }
    Ok(Outcome {
        tables: vec![t],
        verdicts: vec![Verdict::at_most(
            "aperiodicity.max_rho",
            json!({"t_lo": g.t_lo, "t_hi": g.t_hi, "t_step": g.t_step, "argmax_t": t_star}),
            rho,
            spectral::LATTICE_THRESHOLD,
        )],
        summary: format!("max rho(P(t)) = {rho:.15} at t = {t_star:.12}"),
    })
}

fn variance(cfg: &RunConfig) -> Result<Outcome> {
    let v = spectral::variance(&cfg.system, &cfg.observable)?;
    let mut t = Table::new("variance", &["v_gk", "v_fd", "rel_err", "terms"]);
    t.push(vec![num(v.v_gk), num(v.v_fd), num(v.rel_err), int(v.terms)]);
    Ok(Outcome {
        tables: vec![t],
        verdicts: vec![Verdict::at_most(
            "variance.rel_err",
            json!({"v_gk": v.v_gk, "v_fd": v.v_fd}),
            v.rel_err,
            1e-4,
        )],
        summary: String::new(),
    })
}

fn llt(cfg: &RunConfig) -> Result<Outcome> {
    let (sys, obs, k) = (&cfg.system, &cfg.observable, kernel(cfg));
    let v = verify::limit_variance(sys, obs)?;
    let oracle = k.mass() / (2.0 * PI * v).sqrt();
    let delta = spectral::perturbation_window(sys, obs)?;
    let lm = LambdaModulus::new(sys, obs, delta)?;
    let mut t = Table::new("llt", &["n", "sqrt_n_m_f", "oracle", "rel_err", "sqrt_n_lambda_l1"]);
    let mut last = f64::NAN;
    let mut plateau = Vec::new();
    for &n in &cfg.grids.llt_n {
        let root = (n as f64).sqrt();
        let scaled = root * expected_kernel_density(sys, obs, &k, n, 0.0)?;
        let l1 = root * lm.l1_norm(n);
        last = (scaled / oracle - 1.0).abs();
        if n >= 1 << 10 {
            plateau.push(l1);
        }
        t.push(vec![int(n), num(scaled), num(oracle), num(last), num(l1)]);
    }
    let mut verdicts = vec![Verdict::at_most(
        "llt.rel_err_at_largest_n",
        json!({"n": cfg.grids.llt_n.last(), "v": v}),
        last,
        0.05,
    )];
    if !plateau.is_empty() {
        let hi = plateau.iter().cloned().fold(0.0, f64::max);
        let lo = plateau.iter().cloned().fold(f64::INFINITY, f64::min);
        verdicts.push(Verdict::at_most("llt.plateau_spread", json!({"n_min": 1 << 10, "delta": delta}), hi / lo, 1.1));
    }
    Ok(Outcome {
        tables: vec![t],
        verdicts,
        summary: String::new(),
    })
}

fn potential_kernel(cfg: &RunConfig) -> Result<Outcome> {
    let g = &cfg.grids;
    let series = potential_kernel_sums(&cfg.system, &cfg.observable, &kernel(cfg), &g.ys, g.horizon)?;
    let after = 1000.min(g.horizon);
    let mut sums = Table::new("potential_kernel", &["y", "n", "partial_sum", "term"]);
    let mut summary = Table::new(
        "potential_kernel_summary",
        &["y", "sum", "sum_over_y", "max_increment_after", "tail_after"],
    );
    for s in &series {
        for n in 1..=s.horizon() {
            if n <= 10 || n % 10 == 0 {
                sums.push(vec![num(s.y), int(n), num(s.sum_to(n)), num(s.terms[n - 1])]);
            }
        }
        summary.push(vec![
            num(s.y),
            num(s.value()),
            num(s.value() / s.y.abs()),
            num(s.max_increment_after(after)),
            num(s.tail_after(after)),
        ]);
    }
    let incr = series.iter().map(|s| s.max_increment_after(after)).fold(0.0, f64::max);
    let ratios: Vec<f64> = series.iter().filter(|s| s.y != 0.0).map(|s| s.value() / s.y.abs()).collect();
    let hi = ratios.iter().cloned().fold(0.0, f64::max);
    let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(Outcome {
        tables: vec![sums, summary],
        verdicts: vec![
            Verdict::at_most("potential_kernel.max_tail_increment", json!({"N": g.horizon, "after": after}), incr, 1e-6),
            Verdict::at_most("potential_kernel.ratio_spread", json!({"N": g.horizon}), hi / lo, 10.0),
        ],
        summary: String::new(),
    })
}

fn simulate(cfg: &RunConfig) -> Result<Outcome> {
    let p = sample_path(&cfg.system, &cfg.observable, cfg.n, StreamKey::new(cfg.seed, 0))?;
    let w = scaled_path(&p);
    let mut t = Table::new("path", &["k", "state", "increment", "sum", "scaled"]);
    for k in 0..=p.steps() {
        let inc = if k == 0 { 0.0 } else { p.increments[k - 1] };
        t.push(vec![int(k), int(p.states[k]), num(inc), num(p.sums[k]), num(w.values[k])]);
    }
    Ok(Outcome {
        tables: vec![t],
        verdicts: Vec::new(),
        summary: format!("simulated n = {} steps with seed {} (stream 0)", cfg.n, cfg.seed),
    })
}

fn x_grid(cfg: &RunConfig) -> Result<UniformGrid> {
    let w = match cfg.grids.x_half_width {
        Some(w) => w,
        None => 4.0 * verify::limit_variance(&cfg.system, &cfg.observable)?.sqrt(),
    };
    Ok(UniformGrid::spanning(-w, w, cfg.grids.x_points))
}

fn localtime(cfg: &RunConfig, exec: &Rayon) -> Result<Outcome> {
    let k = kernel(cfg);
    let s = Sampler::new(&cfg.system, &cfg.observable)?;
    let grid = x_grid(cfg)?;
    let field = local_time_on(&s.sample(cfg.n, StreamKey::new(cfg.seed, 0)), &k, &grid);
    let mut t = Table::new("localtime", &["x", "l_n"]);
    for (x, l) in field.x_grid.iter().zip(&field.values) {
        t.push(vec![num(*x), num(*l)]);
    }
    let errs: Vec<f64> = exec.map_indexed(cfg.grids.paths, |i| {
        let p = s.sample(cfg.n, StreamKey::new(cfg.seed, i as u64));
        (local_time_on(&p, &k, &mass_grid(&p)).trapezoid_mass() / k.mass() - 1.0).abs()
    });
    let mut m = Table::new("localtime_mass", &["path", "rel_err"]);
    for (i, e) in errs.iter().enumerate() {
        m.push(vec![int(i), num(*e)]);
    }
    Ok(Outcome {
        tables: vec![t, m],
        verdicts: vec![Verdict::at_most(
            "localtime.max_rel_mass_err",
            json!({"paths": cfg.grids.paths, "n": cfg.n}),
            errs.iter().cloned().fold(0.0, f64::max),
            1e-3,
        )],
        summary: String::new(),
    })
}

fn verify_clt(cfg: &RunConfig, exec: &Rayon) -> Result<Outcome> {
    let (sys, obs) = (&cfg.system, &cfg.observable);
    let v = verify::limit_variance(sys, obs)?;
    let z = verify::normalized_endpoints(sys, obs, cfg.n, cfg.samples, cfg.seed, exec)?;
    let sd = v.sqrt();
    let ks = verify::ks_statistic(&z, |x| verify::normal_cdf(x / sd))?;
    let cf = verify::charfn_agreement(sys, obs, cfg.n, &z, &[0.5, 1.0, 2.0])?;
    let mut t = Table::new("clt", &["n", "samples", "v", "statistic", "critical"]);
    t.push(vec![int(cfg.n), int(cfg.samples), num(v), num(ks.statistic), num(ks.critical)]);
    let mut c = Table::new("charfn", &["t", "empirical_re", "empirical_im", "exact_re", "exact_im", "std_err", "z"]);
    for r in &cf {
        c.push(vec![
            num(r.t),
            num(r.empirical.re),
            num(r.empirical.im),
            num(r.exact.re),
            num(r.exact.im),
            num(r.std_err),
            num(r.z_score()),
        ]);
    }
    let zmax = cf.iter().map(|r| r.z_score()).fold(0.0, f64::max);
    Ok(Outcome {
        tables: vec![t, c],
        verdicts: vec![
            Verdict::at_most("clt.ks", json!({"n": cfg.n, "samples": cfg.samples, "v": v}), ks.statistic, ks.critical),
        ],
        summary: format!("largest charfn z-score over t = 0.5, 1, 2: {zmax:.3}"),
    })
}

fn verify_localtime(cfg: &RunConfig, exec: &Rayon) -> Result<Outcome> {
    let (sys, obs, k) = (&cfg.system, &cfg.observable, kernel(cfg));
    // A lattice observable has no |Z| / sqrt v limit; the sandwich still applies.
    let mut tables = Vec::new();
    let mut verdicts = Vec::new();
    let mut summary = String::new();
    match verify::local_time_law_check(sys, obs, &k, cfg.n, cfg.samples, cfg.seed, exec) {
        Ok(ks) => {
            let mut t = Table::new("localtime_ks", &["n", "samples", "statistic", "threshold"]);
            t.push(vec![int(cfg.n), int(cfg.samples), num(ks.statistic), num(0.06)]);
            tables.push(t);
            verdicts.push(Verdict::at_most(
                "localtime.ks",
                json!({"n": cfg.n, "samples": cfg.samples}),
                ks.statistic,
                0.06,
            ));
        }
        Err(e @ loctime_core::Error::ProbableLattice { .. }) => {
            summary = format!("local-time law check skipped: {e}");
        }
        Err(e) => return Err(e.into()),
    }

    let windows = [(-0.5, 0.5, 0.1), (-1.0, 2.0, 0.05), (0.0, 0.25, 0.2)];
    let s = Sampler::new(sys, obs)?;
    let reports = exec.map_indexed(cfg.grids.paths, |i| {
        let p = s.sample(cfg.n, StreamKey::new(cfg.seed, i as u64));
        windows
            .iter()
            .map(|&(a, b, eps)| occupation_sandwich(&p, &k, a, b, eps))
            .collect::<Result<Vec<_>, _>>()
    });
    let mut sw = Table::new(
        "sandwich",
        &["path", "a", "b", "eps", "integral", "lower_bound", "upper_bound", "lower_vacuous", "lower_ok", "upper_ok"],
    );
    let mut violations = 0usize;
    for (i, rs) in reports.into_iter().enumerate() {
        for r in rs? {
            violations += (!r.lower_ok) as usize + (!r.upper_ok) as usize;
            sw.push(vec![
                int(i),
                num(r.a),
                num(r.b),
                num(r.eps),
                num(r.integral),
                num(r.lower_bound),
                num(r.upper_bound),
                int(r.lower_vacuous),
                int(r.lower_ok),
                int(r.upper_ok),
            ]);
        }
    }
    tables.push(sw);
    verdicts.push(Verdict::at_most(
        "sandwich.violations",
        json!({"paths": cfg.grids.paths, "n": cfg.n}),
        violations as f64,
        0.0,
    ));
    Ok(Outcome {
        tables,
        verdicts,
        summary,
    })
}

fn verify_moments(cfg: &RunConfig, exec: &Rayon) -> Result<Outcome> {
    let g = &cfg.grids;
    let rep = verify::moment_ratio_scan(
        &cfg.system,
        &cfg.observable,
        &kernel(cfg),
        &g.n_list,
        0.0,
        &g.offsets,
        cfg.samples,
        cfg.seed,
        exec,
    )?;
    let mut t = Table::new("moments", &["n", "offset", "ratio"]);
    for (i, n) in rep.n_list.iter().enumerate() {
        for (j, o) in rep.offsets.iter().enumerate() {
            t.push(vec![int(n), num(*o), num(rep.ratios[i][j])]);
        }
    }
    let mut m = Table::new("second_moments", &["n", "m_l_n0_sq"]);
    for (n, v) in rep.n_list.iter().zip(&rep.second_moments) {
        m.push(vec![int(n), num(*v)]);
    }
    Ok(Outcome {
        tables: vec![t, m],
        verdicts: vec![
            Verdict::at_most("moments.max_over_median", json!({"samples": cfg.samples}), rep.max_over_median, 3.0),
            Verdict::at_most("moments.second_moment_spread", json!({}), rep.second_moment_spread(), 3.0),
        ],
        summary: String::new(),
    })
}

fn verify_tightness(cfg: &RunConfig, exec: &Rayon) -> Result<Outcome> {
    let g = &cfg.grids;
    let (sys, obs, k) = (&cfg.system, &cfg.observable, kernel(cfg));
    let v = verify::limit_variance(sys, obs)?;
    let dmin = g.deltas.iter().cloned().fold(f64::INFINITY, f64::min);
    let points = g.modulus_points.unwrap_or_else(|| suite::modulus_points(v, dmin));
    let pts = verify::modulus_probe(sys, obs, &k, cfg.n, &g.deltas, g.eps, cfg.samples, cfg.seed, points, exec)?;
    let mut t = Table::new("modulus", &["delta", "probability", "std_err"]);
    for p in &pts {
        t.push(vec![num(p.delta), num(p.probability), num(p.std_err)]);
    }
    let rise = pts
        .windows(2)
        .map(|w| w[1].probability - w[0].probability - (w[0].std_err.powi(2) + w[1].std_err.powi(2)).sqrt())
        .fold(f64::NEG_INFINITY, f64::max);

    // Condition (i) through Chebyshev: P(l_n(0) >= a) <= m(l_n(0)^2) / a^2.
    let l0 = verify::local_time_at_zero(sys, obs, &k, cfg.n, cfg.samples, cfg.seed, exec)?;
    let m2 = k.mass().powi(2) * l0.iter().map(|l| l * l).sum::<f64>() / l0.len() as f64;
    let mut c = Table::new("chebyshev", &["a", "bound", "empirical"]);
    for a in [5.0, 10.0, 20.0, 40.0, 80.0] {
        let emp = l0.iter().filter(|&&l| l * k.mass() >= a).count() as f64 / l0.len() as f64;
        c.push(vec![num(a), num(verify::chebyshev_tail(m2, a)), num(emp)]);
    }

    // Chaining on a dyadic grid of the first path's field.
    let h = 2.0 * v.sqrt();
    let dyadic = UniformGrid::spanning(-h, h, (1 << 9) + 1);
    let p = Sampler::new(sys, obs)?.sample(cfg.n, StreamKey::new(cfg.seed, 0));
    let chain = dyadic_chaining_check(&local_time_on(&p, &k, &dyadic).values)?;
    let mut ch = Table::new("chaining", &["level", "max_increment"]);
    for (i, a) in chain.increments.iter().enumerate() {
        ch.push(vec![int(i), num(*a)]);
    }
    Ok(Outcome {
        tables: vec![t, c, ch],
        verdicts: vec![
            Verdict::at_most(
                "tightness.max_rise_beyond_1se",
                json!({"n": cfg.n, "samples": cfg.samples, "eps": g.eps, "grid_points": points}),
                rise,
                0.0,
            ),
            Verdict::at_most(
                "tightness.chaining_excess",
                json!({"sup_pairwise": chain.sup_pairwise, "bound": chain.bound}),
                chain.sup_pairwise - chain.bound,
                0.0,
            ),
        ],
        summary: String::new(),
    })
}

pub fn report(seed: u64, exec: &Rayon) -> Result<Outcome> {
    let results = suite::run_all(&SuiteOptions::full(seed), exec)?;
    let mut t = Table::new("criteria", &["id", "title", "pass", "verdicts"]);
    let mut summary = String::new();
    let mut verdicts = Vec::new();
    for r in results {
        t.push(vec![int(r.id), r.title.to_string(), int(r.pass()), int(r.verdicts.len())]);
        summary.push_str(&r.line());
        summary.push('\n');
        for n in &r.notes {
            summary.push_str("      note: ");
            summary.push_str(n);
            summary.push('\n');
        }
        verdicts.extend(r.verdicts);
    }
    Ok(Outcome {
        tables: vec![t],
        verdicts,
        summary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_grid_hits_zero_and_ends() {
        let g = symmetric_grid(1.0, 0.25);
        assert_eq!(g, vec![-1.0, -0.75, -0.5, -0.25, 0.0, 0.25, 0.5, 0.75, 1.0]);
    }
}

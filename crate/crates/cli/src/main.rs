use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use loctime_cli::commands::{self, Command};
use loctime_cli::config::{parse_config, RunConfig};
use loctime_cli::error::{CliError, Result};
use loctime_cli::exec::Rayon;
use loctime_cli::output::{all_pass, ensure_dir, write_verdicts};

/// Spectral and Monte-Carlo checks of local-time limit theorems for Markov
/// shifts.
#[derive(Debug, Parser)]
#[command(version)]
struct Args {
    #[arg(value_enum)]
    command: Command,
    /// System description (TOML). Not needed for `report`.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory; overrides `run.out`.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Path length; overrides `run.n`.
    #[arg(long)]
    n: Option<usize>,
    /// Monte-Carlo sample count; overrides `run.samples`.
    #[arg(long)]
    samples: Option<usize>,
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

fn load(args: &Args) -> Result<Option<RunConfig>> {
    let Some(path) = &args.config else {
        return Ok(None);
    };
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let mut cfg = parse_config(&text)?;
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(n) = args.n {
        cfg.n = n;
    }
    if let Some(m) = args.samples {
        cfg.samples = m;
    }
    if let Some(o) = &args.out {
        cfg.out = o.clone();
    }
    Ok(Some(cfg))
}

fn run(args: &Args) -> Result<bool> {
    let exec = Rayon::new(args.threads);
    let cfg = load(args)?;
    let (outcome, out) = match (args.command, &cfg) {
        (Command::Report, _) => {
            let seed = args
                .seed
                .or(cfg.as_ref().map(|c| c.seed))
                .ok_or_else(|| CliError::Validation("report needs --seed or --config".into()))?;
            let out = args
                .out
                .clone()
                .or(cfg.as_ref().map(|c| c.out.clone()))
                .unwrap_or_else(|| PathBuf::from("out"));
            (commands::report(seed, &exec)?, out)
        }
        (cmd, Some(c)) => (commands::run(cmd, c, &exec)?, c.out.clone()),
        (_, None) => return Err(CliError::Validation("--config is required".into())),
    };
    ensure_dir(&out)?;
    for t in &outcome.tables {
        t.write(&out)?;
    }
    write_verdicts(&out, &outcome.verdicts, &outcome.summary)?;
    for v in &outcome.verdicts {
        println!("{}", v.summary_line());
    }
    if !outcome.summary.is_empty() {
        print!("{}", outcome.summary);
        if !outcome.summary.ends_with('\n') {
            println!();
        }
    }
    Ok(all_pass(&outcome.verdicts))
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use tcps_harness::config::{ExperimentConfig, RawConfig};
use tcps_harness::{run, HarnessError, Result};

/// Estimate Pauli-sum expectation values by per-term sampling or coherent
/// phase summation, and compare the two.
#[derive(Parser)]
#[command(name = "tcps", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact per-term means and the exact value.
    Exact(Common),
    /// Per-term sampling estimator.
    Qee(Common),
    /// Coherent summation estimator.
    Tcps(Common),
    /// Both estimators at matched budgets.
    Compare(Common),
    /// Variance ratio or QEE variance against the number of terms.
    Sweep(Common),
    /// Measured and asymptotic resource counts.
    Resources(Common),
    /// The planned budget for the configured instance.
    Budget(Common),
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum MemoryArg {
    Fast,
    Exact,
}

#[derive(Args)]
struct Common {
    /// Configuration file of `key = value` lines.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Observable file; replaces any generator in the configuration.
    #[arg(long)]
    obs: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<u64>,
    /// Report path; standard output by default.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Memory simulation path.
    #[arg(long, value_enum)]
    mode: Option<MemoryArg>,
    /// Worker threads, 0 for one per core.
    #[arg(long)]
    workers: Option<usize>,
    /// Override any configuration key, as `key=value`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

fn build_config(mode: &str, c: &Common) -> Result<ExperimentConfig> {
    let mut raw = match &c.config {
        Some(p) => RawConfig::parse(&std::fs::read_to_string(p)?)?,
        None => RawConfig::default(),
    };
    raw.set("mode", mode)?;
    for pair in &c.overrides {
        raw.set_pair(pair)?;
    }
    if let Some(p) = &c.obs {
        raw.set("generator.kind", "")?;
        raw.set("observable.file", &p.to_string_lossy())?;
    }
    if let Some(s) = c.seed {
        raw.set("seed", &s.to_string())?;
    }
    if let Some(t) = c.trials {
        raw.set("trials", &t.to_string())?;
    }
    if let Some(o) = &c.out {
        raw.set("output.path", &o.to_string_lossy())?;
    }
    if let Some(f) = c.format {
        raw.set("output.format", match f {
            FormatArg::Csv => "csv",
            FormatArg::Json => "json",
        })?;
    }
    if let Some(m) = c.mode {
        raw.set("memory.mode", match m {
            MemoryArg::Fast => "fast",
            MemoryArg::Exact => "exact",
        })?;
    }
    if let Some(w) = c.workers {
        raw.set("workers", &w.to_string())?;
    }
    ExperimentConfig::from_raw(&raw)
}

fn execute(cli: Cli) -> Result<()> {
    let (mode, common) = match &cli.command {
        Command::Exact(c) => ("exact", c),
        Command::Qee(c) => ("qee", c),
        Command::Tcps(c) => ("tcps", c),
        Command::Compare(c) => ("compare", c),
        Command::Sweep(c) => ("sweep", c),
        Command::Resources(c) => ("resources", c),
        Command::Budget(c) => ("budget", c),
    };
    let cfg = build_config(mode, common)?;
    let report = run(&cfg)?;
    report.emit(cfg.output.as_deref(), cfg.format)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(HarnessError::exit_code(&e) as u8)
        }
    }
}

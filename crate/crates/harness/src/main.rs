use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use swaphedge_harness::{apply_overrides, execute, Config, Experiment, Overrides};

/// Approximately optimal swap hedging under liquidity costs: experiment runner.
#[derive(Debug, Parser)]
#[command(name = "swaphedge", version)]
struct Cli {
    /// Experiment to run.
    #[arg(value_enum)]
    experiment: Experiment,

    /// TOML config overlaid on the defaults (or a manifest from a previous run).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Master seed; every random stream is derived from it.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads (default: all cores). Does not affect results.
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// Output directory.
    #[arg(long, global = true, default_value = "results")]
    out: PathBuf,

    /// Monte Carlo paths per value estimate.
    #[arg(long, global = true)]
    samples: Option<u64>,

    /// Optimizer steps Γ.
    #[arg(long, global = true)]
    steps: Option<u64>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: &Cli) -> anyhow::Result<()> {
    let mut cfg = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    let overrides = Overrides {
        seed: cli.seed,
        samples: cli.samples,
        steps: cli.steps,
    };
    for w in apply_overrides(&mut cfg, cli.experiment, overrides)? {
        log::warn!("{w}");
    }
    execute(cli.experiment, &cfg, &cli.out, cli.workers)?;
    Ok(())
}

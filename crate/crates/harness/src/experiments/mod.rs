//! Named experiments. Each one turns the resolved [`Config`] into result
//! tables; [`execute`] writes them with their metadata and manifest.

use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::ValueEnum;
use rayon::prelude::*;
use swaphedge_core::evaluator::optimal_truncated_strategy;
use swaphedge_core::rng::{child_seed, stream};
use swaphedge_core::{
    CostModel, HedgingProblem, OptimizerState, RobbinsMonro, StepSchedule, StrategyParams,
    TruncationScheme,
};

use crate::config::{Config, Start};
use crate::output::{problem_hash, write_manifest, write_table, Cell, Manifest, Row, Table};
use crate::strategy_io;

mod audit;
mod comparisons;
mod error_distribution;
mod memory_sweep;
mod optimize;
mod step_sweep;
mod table1;
mod trajectory;

/// Every experiment the runner knows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Experiment {
    /// Value of the optimal truncated strategy by period count and degree.
    Table1,
    /// Value after Γ steps for a grid of step schedules.
    StepSweep,
    /// Decimated optimizer trajectory and the value surface around it.
    Trajectory,
    /// No-liquidity optimum versus the zero strategy across spreads.
    LambdaCompare,
    /// Distribution of the optimized value over independent replicas.
    ErrorDistribution,
    /// Value before and after optimization over spread and threshold size.
    ThresholdSurface,
    /// Optimized value from the two starting points across spreads.
    InitCompare,
    /// Optimized value for strategies restricted to recent rates.
    MemorySweep,
    /// One optimization run; writes the fitted strategy.
    Optimize,
    /// Per-path, per-trade dump of the self-financing cascade.
    Audit,
}

impl Experiment {
    pub const ALL: &'static [Experiment] = &[
        Experiment::Table1,
        Experiment::StepSweep,
        Experiment::Trajectory,
        Experiment::LambdaCompare,
        Experiment::ErrorDistribution,
        Experiment::ThresholdSurface,
        Experiment::InitCompare,
        Experiment::MemorySweep,
        Experiment::Optimize,
        Experiment::Audit,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Table1 => "table1",
            Experiment::StepSweep => "step-sweep",
            Experiment::Trajectory => "trajectory",
            Experiment::LambdaCompare => "lambda-compare",
            Experiment::ErrorDistribution => "error-distribution",
            Experiment::ThresholdSurface => "threshold-surface",
            Experiment::InitCompare => "init-compare",
            Experiment::MemorySweep => "memory-sweep",
            Experiment::Optimize => "optimize",
            Experiment::Audit => "audit",
        }
    }

    /// Key of this experiment's section in the config.
    pub fn section(self) -> &'static str {
        match self {
            Experiment::Table1 => "table1",
            Experiment::StepSweep => "step_sweep",
            Experiment::Trajectory => "trajectory",
            Experiment::LambdaCompare => "lambda_compare",
            Experiment::ErrorDistribution => "error_distribution",
            Experiment::ThresholdSurface => "threshold_surface",
            Experiment::InitCompare => "init_compare",
            Experiment::MemorySweep => "memory_sweep",
            Experiment::Optimize => "optimize",
            Experiment::Audit => "audit",
        }
    }
}

/// Tables, problem fingerprints and fitted strategies of one run.
#[derive(Debug, Default)]
pub struct RunOutput {
    pub tables: Vec<Table>,
    pub problems: Vec<(String, String)>,
    pub strategies: Vec<(String, StrategyParams)>,
}

impl RunOutput {
    fn record(&mut self, label: impl Into<String>, problem: &HedgingProblem) {
        self.problems.push((label.into(), problem_hash(problem)));
    }
}

/// Command-line overrides; each applies to the selected experiment only.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub samples: Option<u64>,
    pub steps: Option<u64>,
}

/// Apply overrides; returns warnings for flags the experiment does not use.
pub fn apply_overrides(
    cfg: &mut Config,
    exp: Experiment,
    o: Overrides,
) -> anyhow::Result<Vec<String>> {
    let mut warnings = Vec::new();
    if let Some(seed) = o.seed {
        cfg.seed = seed;
    }
    if let Some(n) = o.samples {
        let slot = match exp {
            Experiment::Table1 => &mut cfg.table1.samples,
            Experiment::StepSweep => &mut cfg.step_sweep.samples,
            Experiment::Trajectory => &mut cfg.trajectory.samples,
            Experiment::LambdaCompare => &mut cfg.lambda_compare.samples,
            Experiment::ErrorDistribution => &mut cfg.error_distribution.samples,
            Experiment::ThresholdSurface => &mut cfg.threshold_surface.samples,
            Experiment::InitCompare => &mut cfg.init_compare.samples,
            Experiment::MemorySweep => &mut cfg.memory_sweep.samples,
            Experiment::Optimize => &mut cfg.optimize.samples,
            Experiment::Audit => &mut cfg.audit.paths,
        };
        *slot = n;
    }
    if let Some(n) = o.steps {
        match exp {
            Experiment::StepSweep => cfg.step_sweep.checkpoints = vec![n],
            Experiment::Trajectory => cfg.trajectory.steps = n,
            Experiment::ErrorDistribution => cfg.error_distribution.steps = n,
            Experiment::ThresholdSurface => cfg.threshold_surface.steps = n,
            Experiment::InitCompare => cfg.init_compare.steps = n,
            Experiment::MemorySweep => cfg.memory_sweep.steps = n,
            Experiment::Optimize => cfg.optimize.steps = n,
            Experiment::Table1 | Experiment::LambdaCompare | Experiment::Audit => {
                warnings.push(format!("--steps has no effect on {}", exp.name()));
            }
        }
    }
    cfg.validate()
        .context("after applying command-line overrides")?;
    Ok(warnings)
}

/// Compute the experiment's tables (no files are written).
pub fn run(exp: Experiment, cfg: &Config) -> anyhow::Result<RunOutput> {
    match exp {
        Experiment::Table1 => table1::run(cfg),
        Experiment::StepSweep => step_sweep::run(cfg),
        Experiment::Trajectory => trajectory::run(cfg),
        Experiment::LambdaCompare => comparisons::lambda_compare(cfg),
        Experiment::ErrorDistribution => error_distribution::run(cfg),
        Experiment::ThresholdSurface => comparisons::threshold_surface(cfg),
        Experiment::InitCompare => comparisons::init_compare(cfg),
        Experiment::MemorySweep => memory_sweep::run(cfg),
        Experiment::Optimize => optimize::run(cfg),
        Experiment::Audit => audit::run(cfg),
    }
}

/// Run on `workers` threads and write tables, strategies and the manifest
/// under `out`. Fails (after writing what exists) if any table is incomplete.
pub fn execute(
    exp: Experiment,
    cfg: &Config,
    out: &Path,
    workers: Option<usize>,
) -> anyhow::Result<Vec<PathBuf>> {
    let pool = crate::montecarlo::pool(workers)?;
    log::info!("running {} (seed {})", exp.name(), cfg.seed);
    let result = pool.install(|| run(exp, cfg))?;

    let header = header(exp, cfg)?;
    let mut written = Vec::new();
    let mut failures = Vec::new();
    for table in &result.tables {
        let path = write_table(out, &header, table)?;
        if let Some(msg) = &table.failure {
            failures.push(format!("{}: {msg}", table.name));
        }
        log::info!("wrote {}", path.display());
        written.push(path);
    }
    for (stem, params) in &result.strategies {
        let json = out.join(format!("{stem}.json"));
        let csv = out.join(format!("{stem}.csv"));
        strategy_io::write_json(&json, params)?;
        strategy_io::write_csv(&csv, params)?;
        log::info!("wrote {} and {}", json.display(), csv.display());
        written.push(json);
        written.push(csv);
    }
    let manifest = Manifest {
        experiment: exp.name().to_string(),
        version: env!("CARGO_PKG_VERSION"),
        seed: cfg.seed,
        outputs: written
            .iter()
            .filter_map(|p| p.file_name().map(|n| n.to_string_lossy().into_owned()))
            .collect(),
        problems: result.problems,
        config: serde_json::to_value(cfg)?,
    };
    let mpath = write_manifest(out, &manifest)?;
    log::info!("wrote {}", mpath.display());
    written.push(mpath);
    if !failures.is_empty() {
        anyhow::bail!("incomplete results: {}", failures.join("; "));
    }
    Ok(written)
}

/// `# key=value` block: experiment, seed, version, model, tenor, compacts
/// and the experiment's own settings.
fn header(exp: Experiment, cfg: &Config) -> anyhow::Result<Vec<(String, String)>> {
    let mut out = vec![
        ("experiment".to_string(), exp.name().to_string()),
        ("seed".to_string(), cfg.seed.to_string()),
        ("version".to_string(), env!("CARGO_PKG_VERSION").to_string()),
    ];
    let doc = serde_json::to_value(cfg)?;
    for key in ["model", "tenor", "compacts", exp.section()] {
        crate::config::flatten(&doc[key], key, &mut out);
    }
    Ok(out)
}

/// Seed for Monte Carlo evaluation, shared by every grid point so that
/// values across the grid use common random numbers.
pub(crate) fn eval_seed(cfg: &Config) -> u64 {
    child_seed(cfg.seed, 0)
}

/// Seed of the `k`-th independent optimization path sequence.
pub(crate) fn run_seed(cfg: &Config, k: u64) -> u64 {
    child_seed(cfg.seed, 1 + k)
}

pub(crate) fn build_problem(
    cfg: &Config,
    periods: usize,
    scheme: TruncationScheme,
    cost: CostModel,
) -> anyhow::Result<HedgingProblem> {
    let tenor = cfg.tenor.structure(periods)?;
    Ok(HedgingProblem::new(cfg.model, tenor, cost, scheme)?)
}

pub(crate) fn proportional(lambda: f64) -> CostModel {
    if lambda == 0.0 {
        CostModel::Perfect
    } else {
        CostModel::Proportional { lambda }
    }
}

pub(crate) fn starting_point(problem: &HedgingProblem, start: Start) -> anyhow::Result<Vec<f64>> {
    Ok(match start {
        Start::Zero => vec![0.0; problem.dim()],
        Start::Optimal => {
            optimal_truncated_strategy(problem.params(), problem.swap(), *problem.scheme())?
                .coefficients
        }
    })
}

pub(crate) fn start_label(start: Start) -> &'static str {
    match start {
        Start::Zero => "zero",
        Start::Optimal => "optimal",
    }
}

/// Run `steps` Robbins–Monro iterations on one path sequence.
pub(crate) fn optimize(
    cfg: &Config,
    problem: &HedgingProblem,
    initial: Vec<f64>,
    schedule: StepSchedule,
    steps: u64,
    seed: u64,
) -> anyhow::Result<OptimizerState> {
    let rm = RobbinsMonro::new(schedule, cfg.compacts)?.with_log(0, Vec::new());
    Ok(rm.run_with(problem, initial, steps, &mut stream(seed, 0), |_| {})?)
}

pub(crate) fn schedule_cells(s: &StepSchedule) -> [Cell; 4] {
    match *s {
        StepSchedule::PowerLaw { v1, v2, beta } => {
            ["power_law".into(), v1.into(), v2.into(), beta.into()]
        }
        StepSchedule::Constant { v1 } => [
            "constant".into(),
            v1.into(),
            Cell::Text(String::new()),
            Cell::Text(String::new()),
        ],
    }
}

/// Evaluate grid points in parallel, keeping their order.
pub(crate) fn par_rows<T, F>(points: &[T], f: F) -> Vec<anyhow::Result<Vec<Row>>>
where
    T: Sync,
    F: Fn(usize, &T) -> anyhow::Result<Vec<Row>> + Sync + Send,
{
    points
        .par_iter()
        .enumerate()
        .map(|(i, p)| f(i, p))
        .collect()
}

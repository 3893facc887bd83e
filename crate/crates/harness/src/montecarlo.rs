//! Parallel Monte Carlo with results independent of the worker count.
//!
//! Batches are fixed by the core evaluator (index `b` always draws the same
//! paths from stream `(seed, b)`); workers compute batch statistics in any
//! order and the statistics are merged in batch order.

use rayon::prelude::*;
use swaphedge_core::engine::{GaussianPath, PerfectReplication};
use swaphedge_core::evaluator::{batch_moments, batches};
use swaphedge_core::{EvalReport, HedgingProblem, Moments};

/// `E[wealth²]` over `num_samples` paths.
pub fn estimate_second_moment<F>(
    problem: &HedgingProblem,
    num_samples: u64,
    seed: u64,
    wealth: F,
) -> anyhow::Result<EvalReport>
where
    F: Fn(&GaussianPath) -> swaphedge_core::Result<f64> + Sync,
{
    let plan: Vec<(u64, u64)> = batches(num_samples).collect();
    let parts: Vec<Moments> = plan
        .par_iter()
        .map(|&(b, len)| batch_moments(problem, seed, b, len, &wealth))
        .collect::<Result<_, _>>()?;
    let mut total = Moments::default();
    parts.iter().for_each(|m| total.merge(m));
    Ok(total.report())
}

/// `v(α)` for a chaos strategy.
pub fn estimate_v(
    problem: &HedgingProblem,
    alpha: &[f64],
    num_samples: u64,
    seed: u64,
) -> anyhow::Result<EvalReport> {
    estimate_second_moment(problem, num_samples, seed, |path| {
        problem.wealth(alpha, path)
    })
}

/// Second moment of the terminal wealth of the exact replication strategy.
pub fn estimate_replication(
    problem: &HedgingProblem,
    num_samples: u64,
    seed: u64,
) -> anyhow::Result<EvalReport> {
    let rule = PerfectReplication {
        swap: problem.swap(),
    };
    estimate_second_moment(problem, num_samples, seed, |path| {
        Ok(problem.cascade(&rule, path)?.terminal_wealth)
    })
}

/// Thread pool with `workers` threads (all cores when `None`).
pub fn pool(workers: Option<usize>) -> anyhow::Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = workers {
        anyhow::ensure!(n >= 1, "--workers must be at least 1");
        b = b.num_threads(n);
    }
    Ok(b.build()?)
}

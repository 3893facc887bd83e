//! Distribution of `v(α_Γ)` over independent optimization runs, per spread.
//!
//! Replica `r` uses the same path sequence for every spread, and all values
//! are evaluated on common random numbers, so the spread of the replicas
//! reflects the randomness of the optimizer alone.

use swaphedge_core::Moments;

use super::{
    build_problem, eval_seed, optimize, par_rows, proportional, run_seed, start_label,
    starting_point, RunOutput,
};
use crate::config::Config;
use crate::montecarlo::estimate_v;
use crate::output::{Cell, Table};

pub fn run(cfg: &Config) -> anyhow::Result<RunOutput> {
    let c = &cfg.error_distribution;
    let mut out = RunOutput::default();
    let scheme = Config::scheme(c.periods, c.degree, None);
    let mut problems = Vec::new();
    for &lambda in &c.lambdas {
        let problem = build_problem(cfg, c.periods, scheme, proportional(lambda))?;
        out.record(format!("lambda={lambda}"), &problem);
        problems.push((lambda, problem));
    }
    let ev_seed = eval_seed(cfg);
    let jobs: Vec<(usize, u64)> = (0..problems.len())
        .flat_map(|l| (0..c.replicas).map(move |r| (l, r)))
        .collect();
    let results = par_rows(&jobs, |_, &(l, r)| {
        let (lambda, problem) = &problems[l];
        let initial = starting_point(problem, c.start)?;
        let state = optimize(cfg, problem, initial, c.schedule, c.steps, run_seed(cfg, r))?;
        let v = estimate_v(problem, &state.alpha, c.samples, ev_seed)?;
        Ok(vec![vec![
            (*lambda).into(),
            r.into(),
            v.mean.into(),
            v.std_error.into(),
            state.reinits.into(),
        ]])
    });

    let mut replicas = Table::new(
        "error_distribution_replicas",
        &["lambda", "replica", "v", "std_error", "reinits"],
    );
    replicas.extend_until_error(results);

    let mut summary = Table::new(
        "error_distribution",
        &[
            "lambda",
            "replicas",
            "mean",
            "std_dev",
            "min",
            "max",
            "v_start",
            "std_error_start",
        ],
    );
    summary
        .metadata
        .push(("start".into(), start_label(c.start).into()));
    let per = c.replicas as usize;
    let complete = replicas.rows.len() / per;
    let mut rows = Vec::new();
    for (l, (lambda, problem)) in problems.iter().enumerate().take(complete) {
        let vs: Vec<f64> = replicas.rows[l * per..(l + 1) * per]
            .iter()
            .map(|row| row[2].as_f64().expect("numeric value"))
            .collect();
        let m: Moments = vs.iter().copied().collect();
        let start = estimate_v(
            problem,
            &starting_point(problem, c.start)?,
            c.samples,
            ev_seed,
        )?;
        log::info!(
            "error-distribution λ={lambda}: mean {:.4e}, std {:.2e}",
            m.mean,
            m.std_dev()
        );
        rows.push(Ok(vec![vec![
            (*lambda).into(),
            c.replicas.into(),
            m.mean.into(),
            m.std_dev().into(),
            vs.iter().copied().fold(f64::INFINITY, f64::min).into(),
            vs.iter().copied().fold(f64::NEG_INFINITY, f64::max).into(),
            start.mean.into(),
            Cell::from(start.std_error),
        ]]));
    }
    summary.extend_until_error(rows);
    if let Some(msg) = &replicas.failure {
        summary.failure = Some(msg.clone());
    }
    out.tables.push(summary);
    out.tables.push(replicas);
    Ok(out)
}

//! Strategies restricted to the most recent `q + 1` rates, optimized for
//! each period count, memory and spread.

use super::{
    build_problem, eval_seed, optimize, par_rows, proportional, run_seed, start_label,
    starting_point, RunOutput,
};
use crate::config::Config;
use crate::montecarlo::estimate_v;
use crate::output::Table;

pub fn run(cfg: &Config) -> anyhow::Result<RunOutput> {
    let c = &cfg.memory_sweep;
    let mut out = RunOutput::default();
    let mut points = Vec::new();
    for &n in &c.periods {
        for &q in &c.memories {
            let scheme = Config::scheme(n, c.degree, Some(q));
            for &lambda in &c.lambdas {
                let problem = build_problem(cfg, n, scheme, proportional(lambda))?;
                out.record(format!("N={n} q={q} lambda={lambda}"), &problem);
                points.push((n, q, lambda, problem));
            }
        }
    }
    let (opt_seed, ev_seed) = (run_seed(cfg, 0), eval_seed(cfg));
    let mut table = Table::new(
        "memory_sweep",
        &[
            "periods",
            "memory",
            "lambda",
            "dim",
            "v_initial",
            "std_error_initial",
            "v_optimized",
            "std_error_optimized",
            "reinits",
        ],
    );
    table
        .metadata
        .push(("start".into(), start_label(c.start).into()));
    table.extend_until_error(par_rows(&points, |_, (n, q, lambda, problem)| {
        let initial = starting_point(problem, c.start)?;
        let before = estimate_v(problem, &initial, c.samples, ev_seed)?;
        let state = optimize(cfg, problem, initial, c.schedule, c.steps, opt_seed)?;
        let after = estimate_v(problem, &state.alpha, c.samples, ev_seed)?;
        log::info!(
            "memory-sweep N={n} q={q} λ={lambda}: {:.4e} → {:.4e}",
            before.mean,
            after.mean
        );
        Ok(vec![vec![
            (*n).into(),
            (*q).into(),
            (*lambda).into(),
            problem.dim().into(),
            before.mean.into(),
            before.std_error.into(),
            after.mean.into(),
            after.std_error.into(),
            state.reinits.into(),
        ]])
    }));
    out.tables.push(table);
    Ok(out)
}

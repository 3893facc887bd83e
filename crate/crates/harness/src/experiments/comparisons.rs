//! Strategy comparisons across liquidity-cost grids: no-liquidity optimum
//! versus the zero strategy, value before/after optimization under threshold
//! costs, and optimization from the two starting points.

use swaphedge_core::liquidity::smooth;
use swaphedge_core::CostModel;

use super::{
    build_problem, eval_seed, optimize, par_rows, proportional, run_seed, start_label,
    starting_point, RunOutput,
};
use crate::config::{Config, Start};
use crate::montecarlo::estimate_v;
use crate::output::Table;

pub fn lambda_compare(cfg: &Config) -> anyhow::Result<RunOutput> {
    let c = &cfg.lambda_compare;
    let mut out = RunOutput::default();
    let scheme = Config::scheme(c.periods, c.degree, None);
    let mut points = Vec::new();
    for &lambda in &c.lambdas {
        let problem = build_problem(cfg, c.periods, scheme, proportional(lambda))?;
        out.record(format!("lambda={lambda}"), &problem);
        points.push((lambda, problem));
    }
    let seed = eval_seed(cfg);
    let mut table = Table::new(
        "lambda_compare",
        &[
            "lambda",
            "v_optimal",
            "std_error_optimal",
            "v_zero",
            "std_error_zero",
        ],
    );
    table.extend_until_error(par_rows(&points, |_, (lambda, problem)| {
        let optimal = starting_point(problem, Start::Optimal)?;
        let a = estimate_v(problem, &optimal, c.samples, seed)?;
        let z = estimate_v(problem, &vec![0.0; problem.dim()], c.samples, seed)?;
        log::info!(
            "lambda-compare λ={lambda}: optimal {:.4e}, zero {:.4e}",
            a.mean,
            z.mean
        );
        Ok(vec![vec![
            (*lambda).into(),
            a.mean.into(),
            a.std_error.into(),
            z.mean.into(),
            z.std_error.into(),
        ]])
    }));
    out.tables.push(table);
    Ok(out)
}

pub fn threshold_surface(cfg: &Config) -> anyhow::Result<RunOutput> {
    let c = &cfg.threshold_surface;
    let mut out = RunOutput::default();
    let scheme = Config::scheme(c.periods, c.degree, None);
    let mut points = Vec::new();
    for &lambda in &c.lambdas {
        for &size in &c.sizes {
            let kinked = CostModel::Threshold { lambda, size };
            let cost = if c.epsilon > 0.0 {
                smooth(&kinked, c.epsilon)?
            } else {
                kinked
            };
            let problem = build_problem(cfg, c.periods, scheme, cost)?;
            out.record(format!("lambda={lambda} C={size}"), &problem);
            points.push((lambda, size, problem));
        }
    }
    let (opt_seed, ev_seed) = (run_seed(cfg, 0), eval_seed(cfg));
    let mut table = Table::new(
        "threshold_surface",
        &[
            "lambda",
            "size",
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
    table.extend_until_error(par_rows(&points, |_, (lambda, size, problem)| {
        let initial = starting_point(problem, c.start)?;
        let before = estimate_v(problem, &initial, c.samples, ev_seed)?;
        let state = optimize(cfg, problem, initial, c.schedule, c.steps, opt_seed)?;
        let after = estimate_v(problem, &state.alpha, c.samples, ev_seed)?;
        log::info!(
            "threshold-surface λ={lambda} C={size}: {:.4e} → {:.4e}",
            before.mean,
            after.mean
        );
        Ok(vec![vec![
            (*lambda).into(),
            (*size).into(),
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

pub fn init_compare(cfg: &Config) -> anyhow::Result<RunOutput> {
    let c = &cfg.init_compare;
    let mut out = RunOutput::default();
    let scheme = Config::scheme(c.periods, c.degree, None);
    let mut points = Vec::new();
    for &lambda in &c.lambdas {
        let problem = build_problem(cfg, c.periods, scheme, proportional(lambda))?;
        out.record(format!("lambda={lambda}"), &problem);
        for start in [Start::Optimal, Start::Zero] {
            points.push((lambda, start, problem.clone()));
        }
    }
    let (opt_seed, ev_seed) = (run_seed(cfg, 0), eval_seed(cfg));
    // One optimization per (λ, start); rows pair them up afterwards.
    let runs = par_rows(&points, |_, (lambda, start, problem)| {
        let state = optimize(
            cfg,
            problem,
            starting_point(problem, *start)?,
            c.schedule,
            c.steps,
            opt_seed,
        )?;
        let r = estimate_v(problem, &state.alpha, c.samples, ev_seed)?;
        log::info!(
            "init-compare λ={lambda} from {}: v={:.4e}",
            start_label(*start),
            r.mean
        );
        Ok(vec![vec![
            r.mean.into(),
            r.std_error.into(),
            state.reinits.into(),
        ]])
    });
    let mut table = Table::new(
        "init_compare",
        &[
            "lambda",
            "v_from_optimal",
            "std_error_from_optimal",
            "v_from_zero",
            "std_error_from_zero",
            "relative_difference",
            "reinits_from_optimal",
            "reinits_from_zero",
        ],
    );
    let mut runs = runs.into_iter();
    let paired = c.lambdas.iter().map(|&lambda| {
        let a = runs.next().expect("two runs per spread")?.remove(0);
        let z = runs.next().expect("two runs per spread")?.remove(0);
        let (va, vz) = (
            a[0].as_f64().unwrap_or(f64::NAN),
            z[0].as_f64().unwrap_or(f64::NAN),
        );
        let rel = (va - vz).abs() / va.max(vz);
        Ok(vec![vec![
            lambda.into(),
            a[0].clone(),
            a[1].clone(),
            z[0].clone(),
            z[1].clone(),
            rel.into(),
            a[2].clone(),
            z[2].clone(),
        ]])
    });
    table.extend_until_error(paired.collect::<Vec<_>>());
    out.tables.push(table);
    Ok(out)
}

//! Decimated optimizer trajectories, and the value surface over the two
//! agreement-date legs with every other coefficient held at the optimum.

use swaphedge_core::evaluator::optimal_truncated_strategy;
use swaphedge_core::rng::stream;
use swaphedge_core::{CostModel, RobbinsMonro};

use super::{
    build_problem, eval_seed, par_rows, run_seed, schedule_cells, starting_point, RunOutput,
};
use crate::config::Config;
use crate::montecarlo::estimate_v;
use crate::output::{Cell, Table};

pub fn run(cfg: &Config) -> anyhow::Result<RunOutput> {
    let c = &cfg.trajectory;
    let mut out = RunOutput::default();
    let scheme = Config::scheme(c.periods, c.degree, None);
    let problem = build_problem(cfg, c.periods, scheme, CostModel::Perfect)?;
    out.record("no liquidity costs", &problem);
    let optimum =
        optimal_truncated_strategy(problem.params(), problem.swap(), scheme)?.coefficients;
    let initial = starting_point(&problem, c.start)?;
    let (opt_seed, ev_seed) = (run_seed(cfg, 0), eval_seed(cfg));
    let dim = problem.dim();
    // The agreement-date legs maturing at T_0 and T_1 come first.
    let surface_axes = dim.min(2);

    let mut columns = vec![
        "schedule",
        "v1",
        "v2",
        "beta",
        "gamma",
        "level",
        "reinits",
        "v",
        "v_surface",
    ];
    let names: Vec<String> = (0..dim).map(|i| format!("alpha_{i}")).collect();
    columns.extend(names.iter().map(String::as_str));
    let mut table = Table::new("trajectory", &columns);
    table
        .metadata
        .push(("optimum".into(), serde_json::to_string(&optimum)?));
    table.extend_until_error(par_rows(&c.schedules, |_, schedule| {
        let rm = RobbinsMonro::new(*schedule, cfg.compacts)?.with_log(c.log_every, Vec::new());
        let (_, log) = rm.run(&problem, initial.clone(), c.steps, &mut stream(opt_seed, 0))?;
        let mut rows = Vec::with_capacity(log.len());
        for point in log {
            let v = estimate_v(&problem, &point.coords, c.samples, ev_seed)?;
            let mut partial = optimum.clone();
            partial[..surface_axes].copy_from_slice(&point.coords[..surface_axes]);
            let vs = estimate_v(&problem, &partial, c.samples, ev_seed)?;
            let mut row: Vec<Cell> = schedule_cells(schedule).into();
            row.extend([
                point.gamma.into(),
                point.level.into(),
                point.reinits.into(),
                v.mean.into(),
                vs.mean.into(),
            ]);
            row.extend(point.coords.iter().map(|&a| Cell::from(a)));
            rows.push(row);
        }
        log::info!("trajectory {schedule:?}: {} points", rows.len());
        Ok(rows)
    }));
    out.tables.push(table);

    if c.surface_points > 0 {
        let k = c.surface_points;
        let axis = |r: [f64; 2], i: usize| {
            if k == 1 {
                r[0]
            } else {
                r[0] + (r[1] - r[0]) * i as f64 / (k - 1) as f64
            }
        };
        let grid: Vec<(f64, f64)> = (0..k)
            .flat_map(|i| (0..k).map(move |j| (i, j)))
            .map(|(i, j)| (axis(c.surface_floating, i), axis(c.surface_fixed, j)))
            .collect();
        let mut surface = Table::new(
            "trajectory_surface",
            &["alpha_0", "alpha_1", "v", "std_error"],
        );
        surface.extend_until_error(par_rows(&grid, |_, &(a, b)| {
            let mut alpha = optimum.clone();
            alpha[0] = a;
            alpha[1] = b;
            let r = estimate_v(&problem, &alpha, c.samples, ev_seed)?;
            Ok(vec![vec![
                a.into(),
                b.into(),
                r.mean.into(),
                r.std_error.into(),
            ]])
        }));
        out.tables.push(surface);
    }
    Ok(out)
}

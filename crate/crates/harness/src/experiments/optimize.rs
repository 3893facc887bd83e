//! A single optimization run with a value checkpoint at every logged step.
//! The fitted coefficients are written as a strategy file.

use swaphedge_core::rng::stream;
use swaphedge_core::{RobbinsMonro, StrategyParams};

use super::{build_problem, eval_seed, run_seed, starting_point, RunOutput};
use crate::config::Config;
use crate::montecarlo::estimate_v;
use crate::output::{Cell, Table};

pub fn run(cfg: &Config) -> anyhow::Result<RunOutput> {
    let c = &cfg.optimize;
    let mut out = RunOutput::default();
    let scheme = Config::scheme(c.periods, c.degree, c.memory);
    let problem = build_problem(cfg, c.periods, scheme, c.cost)?;
    out.record("problem", &problem);
    let initial = starting_point(&problem, c.start)?;
    let ev_seed = eval_seed(cfg);

    let rm = RobbinsMonro::new(c.schedule, cfg.compacts)?.with_log(c.log_every, Vec::new());
    let mut columns = vec!["gamma", "level", "reinits", "v", "std_error"];
    let names: Vec<String> = (0..problem.dim()).map(|i| format!("alpha_{i}")).collect();
    columns.extend(names.iter().map(String::as_str));
    let mut table = Table::new("optimize", &columns);

    let start = estimate_v(&problem, &initial, c.samples, ev_seed)?;
    let mut row: Vec<Cell> = vec![
        0u64.into(),
        0u32.into(),
        0u64.into(),
        start.mean.into(),
        start.std_error.into(),
    ];
    row.extend(initial.iter().map(|&a| Cell::from(a)));
    table.rows.push(row);

    let (state, log) = rm.run(&problem, initial, c.steps, &mut stream(run_seed(cfg, 0), 0))?;
    let mut rows = Vec::new();
    for point in log {
        let r = estimate_v(&problem, &point.coords, c.samples, ev_seed);
        rows.push(r.map(|r| {
            log::info!("optimize Γ={}: v={:.4e}", point.gamma, r.mean);
            let mut row: Vec<Cell> = vec![
                point.gamma.into(),
                point.level.into(),
                point.reinits.into(),
                r.mean.into(),
                r.std_error.into(),
            ];
            row.extend(point.coords.iter().map(|&a| Cell::from(a)));
            vec![row]
        }));
    }
    table.extend_until_error(rows);
    out.tables.push(table);
    out.strategies.push((
        "strategy".into(),
        StrategyParams::from_vec(scheme, state.alpha)?,
    ));
    Ok(out)
}

//! Value reached after Γ steps for each step schedule, Γ over a list of
//! checkpoints of a single run per schedule.
//!
//! Aggressive schedules can push the iterate through enough reinitializations
//! that the compacts stop bounding it and the gradient overflows. Such a run
//! is reported as diverged from that step on instead of failing the sweep.

use swaphedge_core::rng::stream;
use swaphedge_core::{CostModel, Error, RobbinsMonro};

use super::{
    build_problem, eval_seed, par_rows, run_seed, schedule_cells, starting_point, RunOutput,
};
use crate::config::Config;
use crate::montecarlo::estimate_v;
use crate::output::{Cell, Table};

pub fn run(cfg: &Config) -> anyhow::Result<RunOutput> {
    let c = &cfg.step_sweep;
    let mut out = RunOutput::default();
    let scheme = Config::scheme(c.periods, c.degree, None);
    let problem = build_problem(cfg, c.periods, scheme, CostModel::Perfect)?;
    out.record("no liquidity costs", &problem);
    let initial = starting_point(&problem, c.start)?;
    let last = *c.checkpoints.last().expect("validated non-empty");
    let every = c.checkpoints.iter().fold(0, |g, &x| gcd(g, x));
    let (opt_seed, ev_seed) = (run_seed(cfg, 0), eval_seed(cfg));

    let mut table = Table::new(
        "step_sweep",
        &[
            "schedule",
            "v1",
            "v2",
            "beta",
            "steps",
            "v",
            "std_error",
            "reinits",
            "level",
            "diverged_at",
        ],
    );
    table.extend_until_error(par_rows(&c.schedules, |_, schedule| {
        let rm = RobbinsMonro::new(*schedule, cfg.compacts)?.with_log(every, Vec::new());
        let mut snapshots = Vec::new();
        let diverged_at = match rm.run_with(
            &problem,
            initial.clone(),
            last,
            &mut stream(opt_seed, 0),
            |s| {
                if c.checkpoints.contains(&s.gamma) {
                    snapshots.push(s.clone());
                }
            },
        ) {
            Ok(_) => None,
            Err(Error::NonFiniteGradient { step }) => {
                log::warn!("step-sweep {schedule:?}: diverged at step {step}");
                Some(step)
            }
            Err(e) => return Err(e.into()),
        };
        let divergence = || diverged_at.map_or(Cell::Text(String::new()), Cell::from);
        let mut rows = Vec::new();
        for s in &snapshots {
            let r = estimate_v(&problem, &s.alpha, c.samples, ev_seed)?;
            log::info!("step-sweep {schedule:?} Γ={}: v={:.3e}", s.gamma, r.mean);
            let mut row: Vec<Cell> = schedule_cells(schedule).into();
            row.extend([
                s.gamma.into(),
                r.mean.into(),
                r.std_error.into(),
                s.reinits.into(),
                s.level.into(),
                divergence(),
            ]);
            rows.push(row);
        }
        for &gamma in c
            .checkpoints
            .iter()
            .filter(|&&g| snapshots.iter().all(|s| s.gamma != g))
        {
            let mut row: Vec<Cell> = schedule_cells(schedule).into();
            let empty = || Cell::Text(String::new());
            row.extend([
                gamma.into(),
                f64::INFINITY.into(),
                empty(),
                empty(),
                empty(),
                divergence(),
            ]);
            rows.push(row);
        }
        Ok(rows)
    }));
    out.tables.push(table);
    Ok(out)
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

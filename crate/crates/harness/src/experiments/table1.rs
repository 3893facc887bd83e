//! Value of the optimal truncated strategy without liquidity costs, for each
//! period count and chaos degree.

use swaphedge_core::evaluator::optimal_truncated_strategy;
use swaphedge_core::{CostModel, TruncationScheme};

use super::{build_problem, eval_seed, par_rows, RunOutput};
use crate::config::Config;
use crate::montecarlo::estimate_v;
use crate::output::Table;

pub fn run(cfg: &Config) -> anyhow::Result<RunOutput> {
    let c = &cfg.table1;
    let mut out = RunOutput::default();
    let mut points = Vec::new();
    for &n in &c.periods {
        for &d in &c.degrees {
            let scheme = TruncationScheme::full(n, d);
            let problem = build_problem(cfg, n, scheme, CostModel::Perfect)?;
            out.record(format!("N={n} d={d}"), &problem);
            points.push((n, d, problem));
        }
    }
    let seed = eval_seed(cfg);
    let mut table = Table::new(
        "table1",
        &[
            "periods",
            "degree",
            "dim",
            "v",
            "std_error",
            "ci99_half_width",
            "samples",
        ],
    );
    table.extend_until_error(par_rows(&points, |_, (n, d, problem)| {
        let alpha =
            optimal_truncated_strategy(problem.params(), problem.swap(), *problem.scheme())?;
        let r = estimate_v(problem, alpha.as_slice(), c.samples, seed)?;
        log::info!("table1 N={n} d={d}: v={:.3e} ± {:.1e}", r.mean, r.std_error);
        Ok(vec![vec![
            (*n).into(),
            (*d).into(),
            problem.dim().into(),
            r.mean.into(),
            r.std_error.into(),
            r.half_width_99.into(),
            r.num_samples.into(),
        ]])
    }));
    out.tables.push(table);
    Ok(out)
}

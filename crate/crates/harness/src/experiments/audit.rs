//! Per-path dump of every trade in the self-financing cascade: bond price,
//! quantity, cash, cash available at the slot and the settlement residual.

use std::path::Path;

use anyhow::bail;
use swaphedge_core::engine::{ChaosRule, PerfectReplication, WealthBreakdown};
use swaphedge_core::rng::stream;

use super::{build_problem, eval_seed, starting_point, RunOutput};
use crate::config::{AuditStrategy, Config, Start};
use crate::output::Table;
use crate::strategy_io;

pub fn run(cfg: &Config) -> anyhow::Result<RunOutput> {
    let c = &cfg.audit;
    let mut out = RunOutput::default();
    let scheme = Config::scheme(c.periods, c.degree, c.memory);
    let problem = build_problem(cfg, c.periods, scheme, c.cost)?;
    out.record("problem", &problem);
    let alpha = match c.strategy {
        AuditStrategy::Zero => Some(starting_point(&problem, Start::Zero)?),
        AuditStrategy::Optimal => Some(starting_point(&problem, Start::Optimal)?),
        AuditStrategy::Replication => None,
        AuditStrategy::File => {
            let params = strategy_io::read_json(Path::new(&c.strategy_file))?;
            if params.scheme != scheme {
                bail!(
                    "audit.strategy_file: strategy was fitted for {:?}, audit is configured for {:?}",
                    params.scheme,
                    scheme
                );
            }
            Some(params.coefficients)
        }
    };

    let mut table = Table::new(
        "audit",
        &[
            "path",
            "slot",
            "time",
            "maturity",
            "bond_price",
            "quantity",
            "cash",
            "inflow",
            "residual",
            "terminal_wealth",
        ],
    );
    let tenor = &problem.swap().tenor;
    let mut rng = stream(eval_seed(cfg), 0);
    for p in 0..c.paths {
        let path = problem.sample_path(&mut rng);
        let record: WealthBreakdown = match &alpha {
            Some(a) => problem.cascade(
                &ChaosRule {
                    basis: problem.basis(),
                    coefficients: a,
                },
                &path,
            )?,
            None => problem.cascade(
                &PerfectReplication {
                    swap: problem.swap(),
                },
                &path,
            )?,
        };
        for (slot, maturity, quantity, cash) in record.trades() {
            table.rows.push(vec![
                p.into(),
                slot.into(),
                tenor.slot_time(slot).into(),
                maturity.into(),
                path.bond(slot, maturity).into(),
                quantity.into(),
                cash.into(),
                record.inflows[slot].into(),
                record.residuals[slot].into(),
                record.terminal_wealth.into(),
            ]);
        }
    }
    out.tables.push(table);
    Ok(out)
}

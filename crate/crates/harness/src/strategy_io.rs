//! Strategy coefficient files.
//!
//! JSON holds the truncation scheme and the flat coefficient vector and can
//! be read back. CSV lists one coefficient per line with its trade slot,
//! bond maturity and multi-index, for inspection.

use std::fs;
use std::path::Path;

use anyhow::Context;
use swaphedge_core::StrategyParams;

pub fn write_json(path: &Path, params: &StrategyParams) -> anyhow::Result<()> {
    let mut text = serde_json::to_string_pretty(params)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

pub fn read_json(path: &Path) -> anyhow::Result<StrategyParams> {
    let text =
        fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let raw: StrategyParams = serde_json::from_str(&text)
        .with_context(|| format!("invalid strategy file {}", path.display()))?;
    // Re-check the coefficient count against the scheme.
    Ok(StrategyParams::from_vec(
        raw.scheme,
        raw.as_slice().to_vec(),
    )?)
}

pub fn write_csv(path: &Path, params: &StrategyParams) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_path(path)
        .with_context(|| format!("cannot create {}", path.display()))?;
    w.write_record(["slot", "maturity", "multi_index", "coefficient"])?;
    let layout = params.scheme.layout();
    for block in params.unflatten() {
        for (idx, c) in layout.indices(block.slot).iter().zip(&block.values) {
            w.write_record([
                block.slot.to_string(),
                block.maturity.to_string(),
                idx.to_string(),
                format!("{c:e}"),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

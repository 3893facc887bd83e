//! CSV result files and run manifests.
//!
//! A result file starts with `# key=value` metadata lines (experiment, seed,
//! resolved settings), followed by an ordinary CSV table. Rows are written in
//! grid order. A file is first written as `<name>.csv.partial` and renamed to
//! `<name>.csv` only when every row is present; a failed run leaves the
//! `.partial` file behind with a trailing `# status=incomplete` line.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Serialize;
use sha2::{Digest, Sha256};
use swaphedge_core::{CostModel, HedgingProblem, TruncationScheme};

/// One CSV cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(u64),
    Float(f64),
    Text(String),
}

impl Cell {
    pub fn render(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            // Shortest representation that round-trips.
            Cell::Float(x) => format!("{x:e}"),
            Cell::Text(s) => s.clone(),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Int(i) => Some(*i as f64),
            Cell::Float(x) => Some(*x),
            Cell::Text(_) => None,
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<u64> for Cell {
    fn from(x: u64) -> Self {
        Cell::Int(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as u64)
    }
}

impl From<u32> for Cell {
    fn from(x: u32) -> Self {
        Cell::Int(x.into())
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_string())
    }
}

impl From<String> for Cell {
    fn from(x: String) -> Self {
        Cell::Text(x)
    }
}

pub type Row = Vec<Cell>;

/// A result table, possibly cut short by a failure.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    /// File stem, e.g. `table1` → `table1.csv`.
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Row>,
    /// Extra `# key=value` lines specific to this table.
    pub metadata: Vec<(String, String)>,
    /// Set when the rows stop early because a grid point failed.
    pub failure: Option<String>,
}

impl Table {
    pub fn new(name: impl Into<String>, columns: &[&str]) -> Self {
        Table {
            name: name.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            metadata: Vec::new(),
            failure: None,
        }
    }

    /// Append rows in order until the first error, which is recorded.
    pub fn extend_until_error<I>(&mut self, results: I)
    where
        I: IntoIterator<Item = anyhow::Result<Vec<Row>>>,
    {
        for r in results {
            match r {
                Ok(rows) => self.rows.extend(rows),
                Err(e) => {
                    self.failure = Some(format!("{e:#}"));
                    return;
                }
            }
        }
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Numeric values of a column.
    pub fn values(&self, name: &str) -> Vec<f64> {
        let i = self.column(name).expect("unknown column");
        self.rows.iter().filter_map(|r| r[i].as_f64()).collect()
    }
}

/// Write `table` under `dir`; returns the final path.
pub fn write_table(
    dir: &Path,
    header: &[(String, String)],
    table: &Table,
) -> anyhow::Result<PathBuf> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    let final_path = dir.join(format!("{}.csv", table.name));
    let partial = dir.join(format!("{}.csv.partial", table.name));
    {
        let file = File::create(&partial)
            .with_context(|| format!("cannot create {}", partial.display()))?;
        let mut out = BufWriter::new(file);
        for (k, v) in header.iter().chain(&table.metadata) {
            writeln!(out, "# {k}={v}")?;
        }
        let mut w = csv::Writer::from_writer(&mut out);
        w.write_record(&table.columns)?;
        for row in &table.rows {
            w.write_record(row.iter().map(Cell::render))?;
        }
        w.flush()?;
        drop(w);
        if let Some(msg) = &table.failure {
            writeln!(out, "# status=incomplete")?;
            writeln!(out, "# error={}", msg.replace('\n', " "))?;
        }
        out.flush()?;
    }
    if table.failure.is_some() {
        return Ok(partial);
    }
    fs::rename(&partial, &final_path).with_context(|| {
        format!(
            "cannot rename {} to {}",
            partial.display(),
            final_path.display()
        )
    })?;
    Ok(final_path)
}

/// Metadata pairs, column names and raw rows of a table read back from disk.
pub type TableContents = (Vec<(String, String)>, Vec<String>, Vec<Vec<String>>);

/// Read back a table written by [`write_table`]: metadata and raw rows.
pub fn read_table(path: &Path) -> anyhow::Result<TableContents> {
    let text =
        fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let mut meta = Vec::new();
    let mut body = String::new();
    for line in text.lines() {
        if let Some(rest) = line.strip_prefix("# ") {
            if let Some((k, v)) = rest.split_once('=') {
                meta.push((k.to_string(), v.to_string()));
            }
        } else {
            body.push_str(line);
            body.push('\n');
        }
    }
    let mut r = csv::Reader::from_reader(body.as_bytes());
    let columns = r.headers()?.iter().map(str::to_string).collect();
    let rows = r
        .records()
        .map(|rec| rec.map(|rec| rec.iter().map(str::to_string).collect()))
        .collect::<Result<_, _>>()?;
    Ok((meta, columns, rows))
}

/// What defines a hedging problem, hashed into the manifest.
#[derive(Debug, Serialize)]
struct ProblemIdentity<'a> {
    model: &'a swaphedge_core::VasicekParams,
    agreement_date: f64,
    dates: &'a [f64],
    fixed_rate: f64,
    notional: f64,
    cost: &'a CostModel,
    scheme: &'a TruncationScheme,
}

/// SHA-256 of the canonical JSON description of a problem.
pub fn problem_hash(problem: &HedgingProblem) -> String {
    let swap = problem.swap();
    let id = ProblemIdentity {
        model: problem.params(),
        agreement_date: swap.tenor.agreement_date(),
        dates: swap.tenor.dates(),
        fixed_rate: swap.fixed_rate,
        notional: swap.notional,
        cost: problem.cost_model(),
        scheme: problem.scheme(),
    };
    let bytes = serde_json::to_vec(&id).expect("problem identity serializes");
    hex::encode(Sha256::digest(&bytes))
}

/// Record of a run: everything needed to reproduce its outputs.
#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub experiment: String,
    pub version: &'static str,
    pub seed: u64,
    pub outputs: Vec<String>,
    /// `(label, sha256)` for every hedging problem solved or evaluated.
    pub problems: Vec<(String, String)>,
    pub config: serde_json::Value,
}

pub fn write_manifest(dir: &Path, manifest: &Manifest) -> anyhow::Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(format!("{}.manifest.json", manifest.experiment));
    let mut text = serde_json::to_string_pretty(manifest)?;
    text.push('\n');
    fs::write(&path, text).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(path)
}

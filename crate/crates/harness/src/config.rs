//! Experiment configuration.
//!
//! Every experiment has built-in defaults. A config file (TOML, or the JSON
//! manifest written by a previous run) is overlaid key by key on top of them,
//! and command-line flags are applied last. Unknown keys and invalid values
//! are reported with the dotted path of the offending key.

use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use swaphedge_core::{
    CompactFamily, CostModel, StepSchedule, TenorStructure, TruncationScheme, VasicekParams,
};

/// Where the optimizer starts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Start {
    /// All coefficients zero: every payoff is rolled into `T_N` bonds.
    Zero,
    /// Optimal truncated strategy of the market without liquidity costs.
    Optimal,
}

/// Strategy evaluated by the audit dump.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AuditStrategy {
    Zero,
    Optimal,
    /// Exact replication, not restricted to the chaos span.
    Replication,
    /// Coefficients read from `strategy_file`.
    File,
}

/// Regular payment schedule: `T_i = first_payment + i·spacing`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TenorConfig {
    pub agreement_date: f64,
    pub first_payment: f64,
    pub spacing: f64,
}

impl Default for TenorConfig {
    fn default() -> Self {
        TenorConfig {
            agreement_date: 0.0,
            first_payment: 1.0,
            spacing: 1.0,
        }
    }
}

impl TenorConfig {
    pub fn structure(&self, num_periods: usize) -> swaphedge_core::Result<TenorStructure> {
        let dates = (0..=num_periods)
            .map(|i| self.first_payment + i as f64 * self.spacing)
            .collect();
        TenorStructure::new(self.agreement_date, dates)
    }
}

fn grid(from: f64, step: f64, count: usize) -> Vec<f64> {
    // Rounded so that the grid prints as 0.01, 0.02, … rather than float noise.
    (0..count)
        .map(|i| ((from + i as f64 * step) * 1e9).round() / 1e9)
        .collect()
}

fn power_law(v1: f64, v2: f64, beta: f64) -> StepSchedule {
    StepSchedule::PowerLaw { v1, v2, beta }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Table1 {
    pub periods: Vec<usize>,
    pub degrees: Vec<u32>,
    pub samples: u64,
}

impl Default for Table1 {
    fn default() -> Self {
        Table1 {
            periods: vec![2, 3],
            degrees: vec![0, 1, 2, 3, 4],
            samples: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepSweep {
    pub periods: usize,
    pub degree: u32,
    pub start: Start,
    pub schedules: Vec<StepSchedule>,
    /// Step counts at which `v(α_Γ)` is reported; one run per schedule covers
    /// all of them.
    pub checkpoints: Vec<u64>,
    pub samples: u64,
}

impl Default for StepSweep {
    fn default() -> Self {
        let mut schedules = Vec::new();
        for v1 in [1.0, 10.0, 100.0, 1e3, 1e4, 2e4, 1e5, 1e6] {
            schedules.push(power_law(v1, 1000.0, 0.6));
        }
        for v1 in [
            1.0, 10.0, 100.0, 1e3, 1e4, 1.3e4, 2e4, 1e5, 5e5, 1e6, 2e6, 3e6, 4e6, 5e6,
        ] {
            schedules.push(power_law(v1, 1000.0, 0.9));
        }
        for v1 in [1.0, 2.0, 4.0, 6.0, 8.0, 10.0, 12.0, 20.0] {
            schedules.push(StepSchedule::Constant { v1 });
        }
        StepSweep {
            periods: 2,
            degree: 1,
            start: Start::Zero,
            schedules,
            checkpoints: vec![10_000, 100_000, 1_000_000],
            samples: 100_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Trajectory {
    pub periods: usize,
    pub degree: u32,
    pub start: Start,
    pub schedules: Vec<StepSchedule>,
    pub steps: u64,
    pub log_every: u64,
    pub samples: u64,
    /// Grid points per axis of the surface over the two agreement-date legs.
    pub surface_points: usize,
    pub surface_floating: [f64; 2],
    pub surface_fixed: [f64; 2],
}

impl Default for Trajectory {
    fn default() -> Self {
        Trajectory {
            periods: 2,
            degree: 1,
            start: Start::Zero,
            schedules: vec![power_law(1e7, 1.0, 1.0), power_law(10.0, 1.0, 0.6)],
            steps: 10_000,
            log_every: 100,
            samples: 20_000,
            surface_points: 21,
            surface_floating: [-0.5, 1.5],
            surface_fixed: [-1.0, 1.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LambdaCompare {
    pub periods: usize,
    pub degree: u32,
    pub lambdas: Vec<f64>,
    pub samples: u64,
}

impl Default for LambdaCompare {
    fn default() -> Self {
        LambdaCompare {
            periods: 3,
            degree: 3,
            lambdas: grid(0.0, 0.01, 10),
            samples: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ErrorDistribution {
    pub periods: usize,
    pub degree: u32,
    pub start: Start,
    pub lambdas: Vec<f64>,
    pub replicas: u64,
    pub steps: u64,
    pub schedule: StepSchedule,
    pub samples: u64,
}

impl Default for ErrorDistribution {
    fn default() -> Self {
        ErrorDistribution {
            periods: 3,
            degree: 3,
            start: Start::Optimal,
            lambdas: grid(0.0, 0.01, 10),
            replicas: 200,
            steps: 10_000,
            schedule: power_law(1.0, 1.0, 1.0),
            samples: 50_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThresholdSurface {
    pub periods: usize,
    pub degree: u32,
    pub start: Start,
    pub lambdas: Vec<f64>,
    pub sizes: Vec<f64>,
    /// Smoothing variance; 0 uses the kinked cost.
    pub epsilon: f64,
    pub steps: u64,
    pub schedule: StepSchedule,
    pub samples: u64,
}

impl Default for ThresholdSurface {
    fn default() -> Self {
        ThresholdSurface {
            periods: 3,
            degree: 3,
            start: Start::Optimal,
            lambdas: grid(0.01, 0.01, 5),
            sizes: grid(0.0, 0.2, 6),
            epsilon: 0.0,
            steps: 1_000_000,
            schedule: power_law(100.0, 100.0, 0.6),
            samples: 100_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitCompare {
    pub periods: usize,
    pub degree: u32,
    pub lambdas: Vec<f64>,
    pub steps: u64,
    pub schedule: StepSchedule,
    pub samples: u64,
}

impl Default for InitCompare {
    fn default() -> Self {
        InitCompare {
            periods: 3,
            degree: 3,
            lambdas: grid(0.01, 0.01, 5),
            steps: 1_000_000,
            schedule: power_law(0.1, 100.0, 0.6),
            samples: 100_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MemorySweep {
    pub periods: Vec<usize>,
    pub degree: u32,
    pub memories: Vec<usize>,
    pub start: Start,
    pub lambdas: Vec<f64>,
    pub steps: u64,
    pub schedule: StepSchedule,
    pub samples: u64,
}

impl Default for MemorySweep {
    fn default() -> Self {
        MemorySweep {
            periods: vec![5, 10],
            degree: 3,
            memories: vec![0, 1, 2],
            start: Start::Zero,
            lambdas: grid(0.01, 0.01, 5),
            steps: 1_000_000,
            schedule: power_law(0.1, 100.0, 0.6),
            samples: 100_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Optimize {
    pub periods: usize,
    pub degree: u32,
    pub memory: Option<usize>,
    pub cost: CostModel,
    pub start: Start,
    pub schedule: StepSchedule,
    pub steps: u64,
    pub log_every: u64,
    pub samples: u64,
}

impl Default for Optimize {
    fn default() -> Self {
        Optimize {
            periods: 2,
            degree: 1,
            memory: None,
            cost: CostModel::Perfect,
            start: Start::Zero,
            schedule: power_law(1000.0, 1000.0, 0.6),
            steps: 10_000,
            log_every: 1000,
            samples: 100_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Audit {
    pub periods: usize,
    pub degree: u32,
    pub memory: Option<usize>,
    pub cost: CostModel,
    pub strategy: AuditStrategy,
    pub strategy_file: String,
    pub paths: u64,
}

impl Default for Audit {
    fn default() -> Self {
        Audit {
            periods: 2,
            degree: 1,
            memory: None,
            cost: CostModel::Proportional { lambda: 0.01 },
            strategy: AuditStrategy::Optimal,
            strategy_file: String::new(),
            paths: 5,
        }
    }
}

/// Complete, resolved configuration of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub seed: u64,
    pub model: VasicekParams,
    pub tenor: TenorConfig,
    pub compacts: CompactFamily,
    pub table1: Table1,
    pub step_sweep: StepSweep,
    pub trajectory: Trajectory,
    pub lambda_compare: LambdaCompare,
    pub error_distribution: ErrorDistribution,
    pub threshold_surface: ThresholdSurface,
    pub init_compare: InitCompare,
    pub memory_sweep: MemorySweep,
    pub optimize: Optimize,
    pub audit: Audit,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            seed: 1,
            model: VasicekParams::default(),
            tenor: TenorConfig::default(),
            compacts: CompactFamily::default(),
            table1: Table1::default(),
            step_sweep: StepSweep::default(),
            trajectory: Trajectory::default(),
            lambda_compare: LambdaCompare::default(),
            error_distribution: ErrorDistribution::default(),
            threshold_surface: ThresholdSurface::default(),
            init_compare: InitCompare::default(),
            memory_sweep: MemorySweep::default(),
            optimize: Optimize::default(),
            audit: Audit::default(),
        }
    }
}

impl Config {
    /// Defaults overlaid with the given document.
    pub fn from_value(user: Value) -> anyhow::Result<Self> {
        let mut merged = serde_json::to_value(Config::default())?;
        overlay(&mut merged, user, "")?;
        let config: Config = serde_path_to_error::deserialize(merged)
            .map_err(|e| anyhow!("invalid config at `{}`: {}", e.path(), e.inner()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_toml_str(text: &str) -> anyhow::Result<Self> {
        let table: toml::Table = toml::from_str(text).context("cannot parse config")?;
        Self::from_value(serde_json::to_value(table)?)
    }

    /// Load a TOML config, or a JSON run manifest (its `config` member).
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        let is_json = path.extension().is_some_and(|e| e == "json");
        let result = if is_json {
            let mut doc: Value = serde_json::from_str(&text).context("cannot parse JSON config")?;
            let doc = match doc.get_mut("config") {
                Some(inner) => inner.take(),
                None => doc,
            };
            Self::from_value(doc)
        } else {
            Self::from_toml_str(&text)
        };
        result.with_context(|| format!("in {}", path.display()))
    }

    /// Check every value the experiments rely on, naming the offending key.
    pub fn validate(&self) -> anyhow::Result<()> {
        self.model.validate().context("model")?;
        for n in [1, 2] {
            self.tenor.structure(n).context("tenor")?;
        }
        self.compacts.validate().context("compacts")?;

        let t = &self.table1;
        nonempty(&t.periods, "table1.periods")?;
        nonempty(&t.degrees, "table1.degrees")?;
        periods_list(&t.periods, "table1.periods")?;
        samples(t.samples, "table1.samples")?;

        let s = &self.step_sweep;
        periods(s.periods, "step_sweep.periods")?;
        schedules(&s.schedules, "step_sweep.schedules")?;
        nonempty(&s.checkpoints, "step_sweep.checkpoints")?;
        if s.checkpoints.contains(&0) || !s.checkpoints.windows(2).all(|w| w[0] < w[1]) {
            bail!("step_sweep.checkpoints: must be positive and strictly increasing");
        }
        samples(s.samples, "step_sweep.samples")?;

        let t = &self.trajectory;
        periods(t.periods, "trajectory.periods")?;
        schedules(&t.schedules, "trajectory.schedules")?;
        steps(t.steps, "trajectory.steps")?;
        if t.log_every == 0 {
            bail!("trajectory.log_every: must be at least 1");
        }
        samples(t.samples, "trajectory.samples")?;
        if t.periods < 2 && t.surface_points > 0 {
            bail!("trajectory.surface_points: the surface needs periods ≥ 2 (two agreement-date legs)");
        }
        range(t.surface_floating, "trajectory.surface_floating")?;
        range(t.surface_fixed, "trajectory.surface_fixed")?;

        let l = &self.lambda_compare;
        periods(l.periods, "lambda_compare.periods")?;
        lambdas(&l.lambdas, "lambda_compare.lambdas")?;
        samples(l.samples, "lambda_compare.samples")?;

        let e = &self.error_distribution;
        periods(e.periods, "error_distribution.periods")?;
        lambdas(&e.lambdas, "error_distribution.lambdas")?;
        if e.replicas == 0 {
            bail!("error_distribution.replicas: must be at least 1");
        }
        steps(e.steps, "error_distribution.steps")?;
        e.schedule
            .validate()
            .context("error_distribution.schedule")?;
        samples(e.samples, "error_distribution.samples")?;

        let t = &self.threshold_surface;
        periods(t.periods, "threshold_surface.periods")?;
        lambdas(&t.lambdas, "threshold_surface.lambdas")?;
        nonempty(&t.sizes, "threshold_surface.sizes")?;
        for (i, &c) in t.sizes.iter().enumerate() {
            if !(c >= 0.0 && c.is_finite()) {
                bail!("threshold_surface.sizes[{i}]: must be non-negative");
            }
        }
        if !(t.epsilon >= 0.0 && t.epsilon.is_finite()) {
            bail!("threshold_surface.epsilon: must be non-negative");
        }
        steps(t.steps, "threshold_surface.steps")?;
        t.schedule
            .validate()
            .context("threshold_surface.schedule")?;
        samples(t.samples, "threshold_surface.samples")?;

        let i = &self.init_compare;
        periods(i.periods, "init_compare.periods")?;
        lambdas(&i.lambdas, "init_compare.lambdas")?;
        steps(i.steps, "init_compare.steps")?;
        i.schedule.validate().context("init_compare.schedule")?;
        samples(i.samples, "init_compare.samples")?;

        let m = &self.memory_sweep;
        nonempty(&m.periods, "memory_sweep.periods")?;
        periods_list(&m.periods, "memory_sweep.periods")?;
        nonempty(&m.memories, "memory_sweep.memories")?;
        lambdas(&m.lambdas, "memory_sweep.lambdas")?;
        steps(m.steps, "memory_sweep.steps")?;
        m.schedule.validate().context("memory_sweep.schedule")?;
        samples(m.samples, "memory_sweep.samples")?;

        let o = &self.optimize;
        periods(o.periods, "optimize.periods")?;
        o.cost.validate().context("optimize.cost")?;
        o.schedule.validate().context("optimize.schedule")?;
        steps(o.steps, "optimize.steps")?;
        samples(o.samples, "optimize.samples")?;

        let a = &self.audit;
        periods(a.periods, "audit.periods")?;
        a.cost.validate().context("audit.cost")?;
        if a.strategy == AuditStrategy::File && a.strategy_file.is_empty() {
            bail!("audit.strategy_file: required when audit.strategy = \"file\"");
        }
        if a.paths == 0 {
            bail!("audit.paths: must be at least 1");
        }
        Ok(())
    }

    pub fn scheme(periods: usize, degree: u32, memory: Option<usize>) -> TruncationScheme {
        match memory {
            None => TruncationScheme::full(periods, degree),
            Some(q) => TruncationScheme::with_memory(periods, degree, q),
        }
    }
}

/// Deep-merge `user` into `base`. Tables merge key by key; tagged values
/// (objects with a `kind` member, such as cost models and step schedules),
/// arrays and scalars are replaced as a whole.
fn overlay(base: &mut Value, user: Value, path: &str) -> anyhow::Result<()> {
    match (base, user) {
        (Value::Object(base), Value::Object(user)) if !base.contains_key("kind") => {
            for (key, value) in user {
                let child = if path.is_empty() {
                    key.clone()
                } else {
                    format!("{path}.{key}")
                };
                match base.get_mut(&key) {
                    Some(slot) => overlay(slot, value, &child)?,
                    None => bail!("unknown config key `{child}`"),
                }
            }
        }
        (slot, value) => *slot = value,
    }
    Ok(())
}

/// `key=value` lines for every leaf of a JSON document, in document order.
pub fn flatten(value: &Value, prefix: &str, out: &mut Vec<(String, String)>) {
    match value {
        Value::Object(map) => flatten_map(map, prefix, out),
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

fn flatten_map(map: &Map<String, Value>, prefix: &str, out: &mut Vec<(String, String)>) {
    for (k, v) in map {
        let key = if prefix.is_empty() {
            k.clone()
        } else {
            format!("{prefix}.{k}")
        };
        flatten(v, &key, out);
    }
}

fn nonempty<T>(v: &[T], key: &str) -> anyhow::Result<()> {
    if v.is_empty() {
        bail!("{key}: must not be empty");
    }
    Ok(())
}

fn periods(n: usize, key: &str) -> anyhow::Result<()> {
    if n == 0 {
        bail!("{key}: must be at least 1");
    }
    Ok(())
}

fn periods_list(ns: &[usize], key: &str) -> anyhow::Result<()> {
    for (i, &n) in ns.iter().enumerate() {
        periods(n, &format!("{key}[{i}]"))?;
    }
    Ok(())
}

fn samples(n: u64, key: &str) -> anyhow::Result<()> {
    if n < 2 {
        bail!("{key}: need at least 2 samples for an error estimate");
    }
    Ok(())
}

fn steps(n: u64, key: &str) -> anyhow::Result<()> {
    if n == 0 {
        bail!("{key}: must be at least 1");
    }
    Ok(())
}

fn schedules(s: &[StepSchedule], key: &str) -> anyhow::Result<()> {
    nonempty(s, key)?;
    for (i, sched) in s.iter().enumerate() {
        sched.validate().with_context(|| format!("{key}[{i}]"))?;
    }
    Ok(())
}

fn lambdas(v: &[f64], key: &str) -> anyhow::Result<()> {
    nonempty(v, key)?;
    for (i, &l) in v.iter().enumerate() {
        if !(0.0..1.0).contains(&l) {
            bail!("{key}[{i}]: spread must lie in [0, 1)");
        }
    }
    Ok(())
}

fn range(r: [f64; 2], key: &str) -> anyhow::Result<()> {
    if !(r[0] < r[1] && r[0].is_finite() && r[1].is_finite()) {
        bail!("{key}: need two finite increasing bounds");
    }
    Ok(())
}

//! Monte Carlo value function, chaos projection of log-normal variables and
//! the optimal truncated strategy without liquidity costs.
//!
//! `v(α)` is the second moment `E[(W^(α))²]` of the terminal wealth. Estimates
//! are computed in fixed-size batches, each on its own random stream, and the
//! batch statistics are merged in batch order, so a result depends only on the
//! seed and the sample count.

use alloc::vec;
use alloc::vec::Vec;

use crate::chaos::{enumerate_multiindices, StrategyBasis, StrategyParams, TruncationScheme};
use crate::engine::{GaussianPath, HedgingProblem};
use crate::error::Result;
use crate::math::{exp, factorial, powf, powi, sqrt};
use crate::rng::stream;
use crate::yield_model::{expected_rate, rate_loadings, SwapSpec, VasicekParams};

/// Paths per Monte Carlo batch. Fixed so that results do not depend on how
/// batches are distributed over workers.
pub const BATCH_SIZE: u64 = 8192;

/// Two-sided 99% standard-normal quantile.
pub const Z_99: f64 = 2.575_829_303_548_901;

/// Running count, mean and sum of squared deviations.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Moments {
    pub count: u64,
    pub mean: f64,
    pub m2: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    /// Combine with the statistics of a disjoint sample.
    pub fn merge(&mut self, other: &Moments) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let n = self.count + other.count;
        let delta = other.mean - self.mean;
        let w = other.count as f64 / n as f64;
        self.mean += delta * w;
        self.m2 += other.m2 + delta * delta * self.count as f64 * w;
        self.count = n;
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }

    pub fn std_dev(&self) -> f64 {
        sqrt(self.variance())
    }

    pub fn report(&self) -> EvalReport {
        let std_error = if self.count == 0 {
            0.0
        } else {
            self.std_dev() / sqrt(self.count as f64)
        };
        EvalReport {
            mean: self.mean,
            std_error,
            num_samples: self.count,
            half_width_99: Z_99 * std_error,
        }
    }
}

impl FromIterator<f64> for Moments {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut m = Moments::default();
        iter.into_iter().for_each(|x| m.push(x));
        m
    }
}

/// Monte Carlo estimate with its uncertainty.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EvalReport {
    pub mean: f64,
    pub std_error: f64,
    pub num_samples: u64,
    pub half_width_99: f64,
}

/// `(batch index, batch length)` pairs covering `num_samples` paths.
pub fn batches(num_samples: u64) -> impl Iterator<Item = (u64, u64)> {
    let full = num_samples / BATCH_SIZE;
    let rest = num_samples % BATCH_SIZE;
    (0..full)
        .map(|b| (b, BATCH_SIZE))
        .chain((rest > 0).then_some((full, rest)))
}

/// Moments of `wealth(path)²` over one batch of paths.
pub fn batch_moments<F>(
    problem: &HedgingProblem,
    seed: u64,
    batch: u64,
    len: u64,
    mut wealth: F,
) -> Result<Moments>
where
    F: FnMut(&GaussianPath) -> Result<f64>,
{
    let mut rng = stream(seed, batch);
    let mut m = Moments::default();
    for _ in 0..len {
        let path = problem.sample_path(&mut rng);
        let w = wealth(&path)?;
        m.push(w * w);
    }
    Ok(m)
}

/// Sequential estimate of `E[wealth²]`; identical to merging
/// [`batch_moments`] over [`batches`] in order.
pub fn estimate_second_moment<F>(
    problem: &HedgingProblem,
    num_samples: u64,
    seed: u64,
    mut wealth: F,
) -> Result<EvalReport>
where
    F: FnMut(&GaussianPath) -> Result<f64>,
{
    let mut total = Moments::default();
    for (b, len) in batches(num_samples) {
        total.merge(&batch_moments(problem, seed, b, len, &mut wealth)?);
    }
    Ok(total.report())
}

/// `v(α) = E[(W^(α))²]` under the problem's cost model.
pub fn estimate_v(
    problem: &HedgingProblem,
    alpha: &[f64],
    num_samples: u64,
    seed: u64,
) -> Result<EvalReport> {
    estimate_second_moment(problem, num_samples, seed, |path| {
        problem.wealth(alpha, path)
    })
}

/// `X = exp(μ + Σ_m λ_m G^(m))` for independent standard normals `G^(m)`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LogNormalSpec {
    pub mu: f64,
    pub loadings: Vec<f64>,
}

impl LogNormalSpec {
    pub fn new(mu: f64, loadings: Vec<f64>) -> Self {
        LogNormalSpec { mu, loadings }
    }

    /// `Σ λ_m²`.
    pub fn total_variance(&self) -> f64 {
        self.loadings.iter().map(|l| l * l).sum()
    }

    pub fn mean(&self) -> f64 {
        exp(self.mu + 0.5 * self.total_variance())
    }

    pub fn value(&self, g: &[f64]) -> f64 {
        exp(self.mu + self.loadings.iter().zip(g).map(|(l, x)| l * x).sum::<f64>())
    }
}

/// Coefficients of the projection of `X` onto the normalized Hermite products
/// of total degree `≤ d`, in graded order.
pub fn project_lognormal(spec: &LogNormalSpec, degree: u32) -> Vec<f64> {
    let scale = spec.mean();
    enumerate_multiindices(spec.loadings.len(), degree)
        .iter()
        .map(|idx| {
            idx.exponents()
                .iter()
                .zip(&spec.loadings)
                .fold(scale, |acc, (&n, &l)| acc * powi(l, n) / sqrt(factorial(n)))
        })
        .collect()
}

/// `‖X − X^d‖₂² = e^{2μ+s} Σ_{K>d} s^K/K!` with `s = Σλ²`.
pub fn tail_norm_exact(spec: &LogNormalSpec, degree: u32) -> f64 {
    let s = spec.total_variance();
    if s == 0.0 {
        return 0.0;
    }
    let mut k = degree + 1;
    let mut term = powf(s, k as f64) / factorial(k);
    let mut sum = 0.0;
    while term > 0.0 && term >= 1e-30 * sum && k < degree + 10_000 {
        sum += term;
        k += 1;
        term *= s / k as f64;
    }
    exp(2.0 * spec.mu + s) * sum
}

/// `exp(μ + s)·s^{(d+1)/2}/√((d+1)!)`, an upper bound on `‖X − X^d‖₂`.
pub fn truncation_bound(spec: &LogNormalSpec, degree: u32) -> f64 {
    let s = spec.total_variance();
    let k = degree + 1;
    exp(spec.mu + s) * powf(s, 0.5 * k as f64) / sqrt(factorial(k))
}

/// Degree-`d` projection of the perfect replication strategy.
///
/// The fixed legs bought at the agreement date are deterministic. The leg
/// bought at `T_{j}` is `1/B(T_j, T_{j+1}) = exp(a + b R_{T_j})`, a log-normal
/// in the variables visible at that slot.
pub fn optimal_truncated_strategy(
    params: &VasicekParams,
    swap: &SwapSpec,
    scheme: TruncationScheme,
) -> Result<StrategyParams> {
    let basis = StrategyBasis::new(scheme, params, &swap.tenor)?;
    let layout = basis.layout();
    let tenor = &swap.tenor;
    let n = swap.num_periods();
    let mut alpha = vec![0.0; layout.dim()];

    // Agreement date: receive the floating leg, pay the fixed leg.
    alpha[layout.offset(0, 0)?] = swap.notional;
    for i in 1..n {
        alpha[layout.offset(0, i)?] = -swap.notional * swap.fixed_rate * tenor.accrual(i);
    }

    for slot in 1..n {
        let j = slot - 1;
        let tau = tenor.dates()[slot] - tenor.dates()[j];
        let b = params.rate_loading(tau);
        let mu = params.log_price_offset(tau) + b * expected_rate(params, tenor, j);
        let c = rate_loadings(params, tenor, j);
        let loadings = basis
            .visible_rows(slot)
            .iter()
            .map(|row| b * row.iter().zip(&c).map(|(w, x)| w * x).sum::<f64>())
            .collect();
        let coeffs = project_lognormal(&LogNormalSpec::new(mu, loadings), scheme.degree);
        let off = layout.offset(slot, slot)?;
        for (a, x) in alpha[off..off + coeffs.len()].iter_mut().zip(coeffs) {
            *a = swap.notional * x;
        }
    }
    StrategyParams::from_vec(scheme, alpha)
}

//! Path simulation and the self-financing trade cascade.
//!
//! Trades happen at slots `s = 0..=N`: slot 0 is the agreement date `t`,
//! slot `s ≥ 1` is `T_{s-1}`. At each slot the strategy chooses the free legs
//! (maturities `s..N`) and the cash balance pins down the quantity of
//! `T_N`-bonds. Slot 0 starts with zero cash. The terminal wealth at `T_N` is
//! the total `T_N`-bond position plus the last swap payoff.

use alloc::vec;
use alloc::vec::Vec;

use rand_core::RngCore;

use crate::chaos::{dot, StrategyBasis, StrategyParams, TruncationScheme};
use crate::error::{Error, Result};
use crate::liquidity::CostModel;
use crate::math::exp;
use crate::rng::fill_standard_normal;
use crate::yield_model::{swap_payoff, SwapSpec, TenorStructure, VasicekParams};

/// One draw of the innovations `G^(0..=N)` and everything derived from it.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianPath {
    draws: Vec<f64>,
    rates: Vec<f64>,
    bonds: Vec<f64>,
    payoffs: Vec<f64>,
}

/// Precomputed coefficients turning innovations into rates, bond prices and
/// payoffs for a fixed model and swap.
#[derive(Debug, Clone, PartialEq)]
pub struct PathGenerator {
    initial_rate: f64,
    long_run_level: f64,
    /// `(e^{-A η_k}, transition std)` per step.
    steps: Vec<(f64, f64)>,
    /// `(a(τ), b(τ))` per `(slot, maturity)`, slot-major, `(N+1)²` entries.
    bond_coeffs: Vec<(f64, f64)>,
    fixed_rate: f64,
    accruals: Vec<f64>,
    notional: f64,
}

impl PathGenerator {
    pub fn new(params: &VasicekParams, swap: &SwapSpec) -> Self {
        let tenor = &swap.tenor;
        let n = tenor.num_periods();
        let steps = (0..=n)
            .map(|k| {
                let eta = tenor.step_length(k);
                (
                    exp(-params.mean_reversion * eta),
                    params.transition_std(eta),
                )
            })
            .collect();
        let width = n + 1;
        let mut bond_coeffs = vec![(0.0, 0.0); width * width];
        for slot in 0..=n {
            let time = tenor.slot_time(slot);
            for maturity in slot..=n {
                let tau = tenor.dates()[maturity] - time;
                bond_coeffs[slot * width + maturity] = if tau == 0.0 {
                    (0.0, 0.0)
                } else {
                    (params.log_price_offset(tau), params.rate_loading(tau))
                };
            }
        }
        PathGenerator {
            initial_rate: params.initial_rate,
            long_run_level: params.long_run_level,
            steps,
            bond_coeffs,
            fixed_rate: swap.fixed_rate,
            accruals: (0..=n)
                .map(|i| if i == 0 { 0.0 } else { tenor.accrual(i) })
                .collect(),
            notional: swap.notional,
        }
    }

    pub fn num_periods(&self) -> usize {
        self.steps.len() - 1
    }

    pub fn generate(&self, draws: Vec<f64>) -> Result<GaussianPath> {
        let n = self.num_periods();
        if draws.len() != n + 1 {
            return Err(Error::DimensionMismatch {
                expected: n + 1,
                found: draws.len(),
            });
        }
        let mut rates = Vec::with_capacity(n + 1);
        let mut r = self.initial_rate;
        for (&(decay, std), &g) in self.steps.iter().zip(&draws) {
            r = self.long_run_level + decay * (r - self.long_run_level) + std * g;
            rates.push(r);
        }
        let width = n + 1;
        let mut bonds = vec![f64::NAN; width * width];
        for slot in 0..=n {
            let rate = if slot == 0 {
                self.initial_rate
            } else {
                rates[slot - 1]
            };
            for maturity in slot..=n {
                let (a, b) = self.bond_coeffs[slot * width + maturity];
                bonds[slot * width + maturity] = exp(-a - b * rate);
            }
        }
        let mut payoffs = vec![0.0; n + 1];
        for i in 1..=n {
            let b = bonds[i * width + i];
            payoffs[i] = self.notional * swap_payoff(self.fixed_rate, self.accruals[i], b)?;
        }
        Ok(GaussianPath {
            draws,
            rates,
            bonds,
            payoffs,
        })
    }

    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> GaussianPath {
        let mut draws = vec![0.0; self.num_periods() + 1];
        fill_standard_normal(rng, &mut draws);
        self.generate(draws)
            .expect("simulated bond prices are positive")
    }
}

impl GaussianPath {
    pub fn from_draws(params: &VasicekParams, swap: &SwapSpec, draws: Vec<f64>) -> Result<Self> {
        PathGenerator::new(params, swap).generate(draws)
    }

    pub fn sample<R: RngCore + ?Sized>(
        rng: &mut R,
        params: &VasicekParams,
        swap: &SwapSpec,
    ) -> Self {
        PathGenerator::new(params, swap).sample(rng)
    }

    pub fn num_periods(&self) -> usize {
        self.draws.len() - 1
    }

    pub fn draws(&self) -> &[f64] {
        &self.draws
    }

    /// `R_{T_k}` for `k = 0..=N`.
    pub fn rates(&self) -> &[f64] {
        &self.rates
    }

    /// Price at trade slot `slot` of the bond maturing at `T_maturity`.
    pub fn bond(&self, slot: usize, maturity: usize) -> f64 {
        debug_assert!(maturity >= slot);
        self.bonds[slot * (self.num_periods() + 1) + maturity]
    }

    /// Swap payoff `P(i)` paid at `T_i` (`P(0) = 0`), notional included.
    pub fn payoff(&self, i: usize) -> f64 {
        self.payoffs[i]
    }

    pub fn payoffs(&self) -> &[f64] {
        &self.payoffs
    }
}

/// Objective applied to the terminal wealth.
pub trait Loss {
    fn value(&self, wealth: f64) -> f64;
    fn derivative(&self, wealth: f64) -> f64;
}

/// `S(x) = x²`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Quadratic;

impl Loss for Quadratic {
    fn value(&self, wealth: f64) -> f64 {
        wealth * wealth
    }

    fn derivative(&self, wealth: f64) -> f64 {
        2.0 * wealth
    }
}

/// Supplies the free legs of a strategy on a path.
pub trait QuantityRule {
    /// Fill `out[m - slot]` for the free maturities `m` in `slot..N`.
    fn free_quantities(&self, slot: usize, path: &GaussianPath, out: &mut [f64]) -> Result<()>;
}

/// Chaos-parametrized strategy.
#[derive(Debug, Clone, Copy)]
pub struct ChaosRule<'a> {
    pub basis: &'a StrategyBasis,
    pub coefficients: &'a [f64],
}

impl QuantityRule for ChaosRule<'_> {
    fn free_quantities(&self, slot: usize, path: &GaussianPath, out: &mut [f64]) -> Result<()> {
        let layout = self.basis.layout();
        let mut phi = Vec::new();
        self.basis.basis_values(slot, path.draws(), &mut phi);
        for (k, q) in out.iter_mut().enumerate() {
            let off = layout.offset(slot, slot + k)?;
            *q = dot(&self.coefficients[off..off + phi.len()], &phi);
        }
        Ok(())
    }
}

/// The exact replication of the swap without liquidity costs: static fixed
/// legs at `t`, and at every `T_{j}` a purchase of `1/B(T_j, T_{j+1})` bonds
/// costing exactly one unit of cash.
#[derive(Debug, Clone, Copy)]
pub struct PerfectReplication<'a> {
    pub swap: &'a SwapSpec,
}

impl QuantityRule for PerfectReplication<'_> {
    fn free_quantities(&self, slot: usize, path: &GaussianPath, out: &mut [f64]) -> Result<()> {
        let all = perfect_replication_quantities(self.swap, path, slot);
        out.copy_from_slice(&all[..out.len()]);
        Ok(())
    }
}

/// Perfect-replication quantities at `slot` for maturities `slot..=N`,
/// including the `T_N` leg.
pub fn perfect_replication_quantities(
    swap: &SwapSpec,
    path: &GaussianPath,
    slot: usize,
) -> Vec<f64> {
    let n = swap.num_periods();
    let tenor = &swap.tenor;
    let notional = swap.notional;
    let mut out = vec![0.0; n + 1 - slot];
    if slot == 0 {
        out[0] = notional;
        for (i, o) in out.iter_mut().enumerate().skip(1) {
            *o -= notional * swap.fixed_rate * tenor.accrual(i);
        }
        out[n] -= notional;
    } else {
        out[0] = notional / path.bond(slot, slot);
    }
    out
}

/// Zero strategy: every payoff is rolled into `T_N` bonds.
pub fn null_strategy(scheme: TruncationScheme) -> StrategyParams {
    StrategyParams::zeros(scheme)
}

/// Per-path record of the cascade.
#[derive(Debug, Clone, PartialEq)]
pub struct WealthBreakdown {
    num_periods: usize,
    /// `(N+1)×(N+1)`, slot-major; entries with maturity < slot are zero.
    quantities: Vec<f64>,
    costs: Vec<f64>,
    pub inflows: Vec<f64>,
    pub residuals: Vec<f64>,
    pub terminal_wealth: f64,
}

impl WealthBreakdown {
    pub fn quantity(&self, slot: usize, maturity: usize) -> f64 {
        self.quantities[slot * (self.num_periods + 1) + maturity]
    }

    /// Cash paid at `slot` for the `maturity` leg.
    pub fn cash(&self, slot: usize, maturity: usize) -> f64 {
        self.costs[slot * (self.num_periods + 1) + maturity]
    }

    pub fn num_periods(&self) -> usize {
        self.num_periods
    }

    pub fn max_abs_residual(&self) -> f64 {
        self.residuals.iter().fold(0.0, |m, r| m.max(r.abs()))
    }

    /// All trades as `(slot, maturity, quantity, cash)`.
    pub fn trades(&self) -> impl Iterator<Item = (usize, usize, f64, f64)> + '_ {
        let n = self.num_periods;
        (0..=n)
            .flat_map(move |s| (s..=n).map(move |m| (s, m, self.quantity(s, m), self.cash(s, m))))
    }
}

/// A fully specified hedging problem: model, swap, costs and strategy basis.
#[derive(Debug, Clone)]
pub struct HedgingProblem {
    params: VasicekParams,
    swap: SwapSpec,
    cost: CostModel,
    basis: StrategyBasis,
    generator: PathGenerator,
}

impl HedgingProblem {
    /// At-the-money unit swap on `tenor`.
    pub fn new(
        params: VasicekParams,
        tenor: TenorStructure,
        cost: CostModel,
        scheme: TruncationScheme,
    ) -> Result<Self> {
        params.validate()?;
        let swap = SwapSpec::at_the_money(&params, tenor);
        Self::with_swap(params, swap, cost, scheme)
    }

    pub fn with_swap(
        params: VasicekParams,
        swap: SwapSpec,
        cost: CostModel,
        scheme: TruncationScheme,
    ) -> Result<Self> {
        params.validate()?;
        cost.validate()?;
        let basis = StrategyBasis::new(scheme, &params, &swap.tenor)?;
        let generator = PathGenerator::new(&params, &swap);
        Ok(HedgingProblem {
            params,
            swap,
            cost,
            basis,
            generator,
        })
    }

    pub fn params(&self) -> &VasicekParams {
        &self.params
    }

    pub fn swap(&self) -> &SwapSpec {
        &self.swap
    }

    pub fn cost_model(&self) -> &CostModel {
        &self.cost
    }

    pub fn basis(&self) -> &StrategyBasis {
        &self.basis
    }

    pub fn scheme(&self) -> &TruncationScheme {
        self.basis.scheme()
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn num_periods(&self) -> usize {
        self.swap.num_periods()
    }

    /// Same problem with another cost model.
    pub fn with_cost(&self, cost: CostModel) -> Result<Self> {
        cost.validate()?;
        Ok(HedgingProblem {
            cost,
            ..self.clone()
        })
    }

    pub fn sample_path<R: RngCore + ?Sized>(&self, rng: &mut R) -> GaussianPath {
        self.generator.sample(rng)
    }

    pub fn path_from_draws(&self, draws: Vec<f64>) -> Result<GaussianPath> {
        self.generator.generate(draws)
    }

    fn check_alpha(&self, alpha: &[f64]) -> Result<()> {
        if alpha.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: alpha.len(),
            });
        }
        Ok(())
    }

    /// Run the cascade for any rule for the free legs.
    pub fn cascade<Q: QuantityRule + ?Sized>(
        &self,
        rule: &Q,
        path: &GaussianPath,
    ) -> Result<WealthBreakdown> {
        let n = self.num_periods();
        let width = n + 1;
        let mut quantities = vec![0.0; width * width];
        for slot in 0..n {
            rule.free_quantities(
                slot,
                path,
                &mut quantities[slot * width + slot..slot * width + n],
            )?;
        }
        self.settle(path, quantities)
    }

    /// Full cascade record for a chaos strategy.
    pub fn terminal_wealth(&self, alpha: &[f64], path: &GaussianPath) -> Result<WealthBreakdown> {
        self.check_alpha(alpha)?;
        self.cascade(
            &ChaosRule {
                basis: &self.basis,
                coefficients: alpha,
            },
            path,
        )
    }

    /// Terminal wealth only.
    pub fn wealth(&self, alpha: &[f64], path: &GaussianPath) -> Result<f64> {
        Ok(self.terminal_wealth(alpha, path)?.terminal_wealth)
    }

    /// Terminal wealth and its gradient in the coefficients, written to `grad`.
    pub fn wealth_gradient(
        &self,
        alpha: &[f64],
        path: &GaussianPath,
        grad: &mut [f64],
    ) -> Result<f64> {
        self.check_alpha(alpha)?;
        if grad.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: grad.len(),
            });
        }
        let n = self.num_periods();
        let width = n + 1;
        let layout = self.basis.layout();
        let phis: Vec<Vec<f64>> = (0..n)
            .map(|slot| {
                let mut phi = Vec::new();
                self.basis.basis_values(slot, path.draws(), &mut phi);
                phi
            })
            .collect();
        let mut quantities = vec![0.0; width * width];
        for (slot, phi) in phis.iter().enumerate() {
            for maturity in slot..n {
                let off = layout.offset(slot, maturity)?;
                quantities[slot * width + maturity] = dot(&alpha[off..off + phi.len()], phi);
            }
        }
        let record = self.settle(path, quantities)?;

        // dπ(s,N)/dy = 1 / Ψ'_{s,N}(π(s,N)) where y is the cash left for it.
        let inv_solved: Vec<f64> = (0..=n)
            .map(|s| 1.0 / (path.bond(s, n) * self.cost.unit_slope(record.quantity(s, n))))
            .collect();
        for (slot, phi) in phis.iter().enumerate() {
            for maturity in slot..n {
                let slope = path.bond(slot, maturity)
                    * self.cost.unit_slope(record.quantity(slot, maturity));
                let factor = inv_solved[maturity + 1] - slope * inv_solved[slot];
                let off = layout.offset(slot, maturity)?;
                grad[off..off + phi.len()]
                    .iter_mut()
                    .zip(phi)
                    .for_each(|(g, p)| *g = factor * p);
            }
        }
        Ok(record.terminal_wealth)
    }

    /// `∇_α S(W)`; returns `S(W)`.
    pub fn objective_gradient<L: Loss + ?Sized>(
        &self,
        alpha: &[f64],
        path: &GaussianPath,
        loss: &L,
        grad: &mut [f64],
    ) -> Result<f64> {
        let w = self.wealth_gradient(alpha, path, grad)?;
        let ds = loss.derivative(w);
        grad.iter_mut().for_each(|g| *g *= ds);
        Ok(loss.value(w))
    }

    /// Solve the `T_N` legs slot by slot given the free legs.
    fn settle(&self, path: &GaussianPath, mut quantities: Vec<f64>) -> Result<WealthBreakdown> {
        let n = self.num_periods();
        let width = n + 1;
        let mut costs = vec![0.0; width * width];
        let mut inflows = vec![0.0; width];
        let mut residuals = vec![0.0; width];
        let mut wealth = path.payoff(n);
        for slot in 0..=n {
            let inflow = if slot == 0 {
                0.0
            } else {
                let j = slot - 1;
                (0..slot).map(|k| quantities[k * width + j]).sum::<f64>() + path.payoff(j)
            };
            let mut spent = 0.0;
            for maturity in slot..n {
                let c = self.cost.cost(
                    path.bond(slot, maturity),
                    quantities[slot * width + maturity],
                )?;
                costs[slot * width + maturity] = c;
                spent += c;
            }
            let b_last = path.bond(slot, n);
            let solved = self.cost.cost_inverse(b_last, inflow - spent)?;
            let c_last = self.cost.cost(b_last, solved)?;
            quantities[slot * width + n] = solved;
            costs[slot * width + n] = c_last;
            inflows[slot] = inflow;
            residuals[slot] = inflow - spent - c_last;
            wealth += solved;
        }
        Ok(WealthBreakdown {
            num_periods: n,
            quantities,
            costs,
            inflows,
            residuals,
            terminal_wealth: wealth,
        })
    }
}

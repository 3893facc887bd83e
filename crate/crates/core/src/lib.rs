//! Approximately optimal hedging of interest-rate swaps under bid-ask
//! liquidity costs.
//!
//! Hedging strategies are parametrized by their coefficients on a truncated
//! basis of normalized Hermite products of the Gaussian innovations driving a
//! one-factor Vasicek short rate. The coefficients are fitted with a
//! Robbins–Monro stochastic gradient iteration that reinitializes on an
//! expanding family of compact sets.
//!
//! The crate is `no_std` (it needs `alloc`). IO, configuration, parallel
//! Monte Carlo and the command line live in the companion harness crate.
//!
//! Module map:
//!
//! * [`yield_model`]: Vasicek dynamics, bond prices, forward rates, swap payoffs.
//! * [`chaos`]: Hermite basis, multi-index enumeration, coefficient layout.
//! * [`liquidity`]: cost functions, inverses, smoothing, self-financing solve.
//! * [`engine`]: path simulation, trade cascade, terminal wealth and gradient.
//! * [`optimizer`]: step schedules, compact family, Robbins–Monro iteration.
//! * [`evaluator`]: Monte Carlo value function and log-normal chaos projection.

#![no_std]
#![deny(rust_2018_idioms)]
#![warn(missing_debug_implementations)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod chaos;
pub mod engine;
mod error;
pub mod evaluator;
pub mod liquidity;
mod math;
pub mod optimizer;
pub mod rng;
pub mod yield_model;

pub use chaos::{MultiIndex, StrategyBasis, StrategyLayout, StrategyParams, TruncationScheme};
pub use engine::{GaussianPath, HedgingProblem, Loss, PathGenerator, Quadratic, WealthBreakdown};
pub use error::{Error, Result};
pub use evaluator::{EvalReport, LogNormalSpec, Moments};
pub use liquidity::CostModel;
pub use optimizer::{CompactFamily, OptimizerState, RobbinsMonro, StepSchedule};
pub use yield_model::{SwapSpec, TenorStructure, VasicekParams};

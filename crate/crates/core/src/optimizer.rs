//! Robbins–Monro stochastic gradient iteration with reinitialization on an
//! expanding family of compact sets.
//!
//! Each iteration draws one fresh path, evaluates the gradient of the loss of
//! the terminal wealth, and moves `α ← α − ρ_{γ+1}·∇`. When the new iterate
//! leaves the current compact `K_l`, it is reset to the starting point and the
//! compact is enlarged to `K_{l+1}`.

use alloc::vec;
use alloc::vec::Vec;

use rand_core::RngCore;

use crate::engine::{HedgingProblem, Loss, Quadratic};
use crate::error::{Error, Result};
use crate::math::powf;

/// Step-size sequence `ρ_γ`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(
    feature = "serde",
    serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)
)]
pub enum StepSchedule {
    /// `v1 / (v2 + γ)^β`.
    PowerLaw { v1: f64, v2: f64, beta: f64 },
    /// `v1` for every step.
    Constant { v1: f64 },
}

impl StepSchedule {
    pub fn validate(&self) -> Result<()> {
        match *self {
            StepSchedule::PowerLaw { v1, v2, beta } => {
                if !(v1 > 0.0 && v1.is_finite()) {
                    return Err(Error::invalid("v1", "must be positive and finite"));
                }
                if !(v2 >= 0.0 && v2.is_finite()) {
                    return Err(Error::invalid("v2", "must be non-negative and finite"));
                }
                if !(beta > 0.5 && beta <= 1.0) {
                    return Err(Error::invalid("beta", "must lie in (1/2, 1]"));
                }
            }
            StepSchedule::Constant { v1 } => {
                if !(v1 > 0.0 && v1.is_finite()) {
                    return Err(Error::invalid("v1", "must be positive and finite"));
                }
            }
        }
        Ok(())
    }

    /// Step size for step number `gamma ≥ 1`.
    pub fn rho(&self, gamma: u64) -> f64 {
        debug_assert!(gamma >= 1);
        match *self {
            StepSchedule::PowerLaw { v1, v2, beta } => v1 / powf(v2 + gamma as f64, beta),
            StepSchedule::Constant { v1 } => v1,
        }
    }
}

/// `K_l = {α : ‖α‖_∞ ≤ base_radius · growth^l}`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct CompactFamily {
    pub base_radius: f64,
    pub growth: f64,
}

impl Default for CompactFamily {
    fn default() -> Self {
        CompactFamily {
            base_radius: 10.0,
            growth: 2.0,
        }
    }
}

impl CompactFamily {
    pub fn validate(&self) -> Result<()> {
        if !(self.base_radius > 0.0 && self.base_radius.is_finite()) {
            return Err(Error::invalid("base_radius", "must be positive and finite"));
        }
        if !(self.growth > 1.0 && self.growth.is_finite()) {
            return Err(Error::invalid("growth", "must exceed 1"));
        }
        Ok(())
    }

    pub fn radius(&self, level: u32) -> f64 {
        self.base_radius * powf(self.growth, level as f64)
    }

    pub fn contains(&self, level: u32, alpha: &[f64]) -> bool {
        let r = self.radius(level);
        alpha.iter().all(|a| a.abs() <= r)
    }

    /// Smallest level whose compact contains `alpha`.
    pub fn level_of(&self, alpha: &[f64]) -> u32 {
        let mut level = 0;
        while !self.contains(level, alpha) {
            level += 1;
        }
        level
    }
}

/// What a single step did.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepOutcome {
    Moved,
    Reinitialized,
}

/// Iterate of the algorithm.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct OptimizerState {
    pub alpha: Vec<f64>,
    pub initial: Vec<f64>,
    /// Number of steps taken.
    pub gamma: u64,
    /// Index `l` of the current compact.
    pub level: u32,
    pub reinits: u64,
}

impl OptimizerState {
    /// Start at `initial`, inside the smallest compact containing it.
    pub fn new(initial: Vec<f64>, compacts: &CompactFamily) -> Result<Self> {
        compacts.validate()?;
        if initial.iter().any(|a| !a.is_finite()) {
            return Err(Error::invalid("alpha_0", "must be finite"));
        }
        Ok(OptimizerState {
            alpha: initial.clone(),
            level: compacts.level_of(&initial),
            initial,
            gamma: 0,
            reinits: 0,
        })
    }

    /// Apply one gradient step, or reinitialize if it leaves the compact.
    pub fn step(
        &mut self,
        grad: &[f64],
        schedule: &StepSchedule,
        compacts: &CompactFamily,
    ) -> Result<StepOutcome> {
        if grad.len() != self.alpha.len() {
            return Err(Error::DimensionMismatch {
                expected: self.alpha.len(),
                found: grad.len(),
            });
        }
        if grad.iter().any(|g| !g.is_finite()) {
            return Err(Error::NonFiniteGradient {
                step: self.gamma + 1,
            });
        }
        self.gamma += 1;
        let rho = schedule.rho(self.gamma);
        let radius = compacts.radius(self.level);
        let mut inside = true;
        let mut next = self.alpha.clone();
        for (a, g) in next.iter_mut().zip(grad) {
            *a -= rho * g;
            inside &= a.abs() <= radius;
        }
        if inside {
            self.alpha = next;
            Ok(StepOutcome::Moved)
        } else {
            self.alpha.clone_from(&self.initial);
            self.level += 1;
            self.reinits += 1;
            Ok(StepOutcome::Reinitialized)
        }
    }
}

/// A source of unbiased noisy gradients of an objective.
pub trait StochasticGradient {
    fn dim(&self) -> usize;

    /// Draw one sample, write its gradient to `grad` and return the sampled
    /// objective value.
    fn sample_gradient(
        &self,
        alpha: &[f64],
        rng: &mut dyn RngCore,
        grad: &mut [f64],
    ) -> Result<f64>;
}

/// `S(W^(α))` for a hedging problem and a loss.
#[derive(Debug, Clone, Copy)]
pub struct HedgingObjective<'a, L> {
    pub problem: &'a HedgingProblem,
    pub loss: L,
}

impl<L: Loss> StochasticGradient for HedgingObjective<'_, L> {
    fn dim(&self) -> usize {
        self.problem.dim()
    }

    fn sample_gradient(
        &self,
        alpha: &[f64],
        rng: &mut dyn RngCore,
        grad: &mut [f64],
    ) -> Result<f64> {
        let path = self.problem.sample_path(rng);
        self.problem
            .objective_gradient(alpha, &path, &self.loss, grad)
    }
}

impl StochasticGradient for HedgingProblem {
    fn dim(&self) -> usize {
        HedgingProblem::dim(self)
    }

    fn sample_gradient(
        &self,
        alpha: &[f64],
        rng: &mut dyn RngCore,
        grad: &mut [f64],
    ) -> Result<f64> {
        HedgingObjective {
            problem: self,
            loss: Quadratic,
        }
        .sample_gradient(alpha, rng, grad)
    }
}

/// Decimated record of the iterate.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryPoint {
    pub gamma: u64,
    pub level: u32,
    pub reinits: u64,
    /// Logged coordinates of `α_γ`, in the order requested.
    pub coords: Vec<f64>,
}

/// Configured Robbins–Monro driver.
#[derive(Debug, Clone, PartialEq)]
pub struct RobbinsMonro {
    pub schedule: StepSchedule,
    pub compacts: CompactFamily,
    /// Log every `log_every` steps (and the last one); 0 disables the log.
    pub log_every: u64,
    /// Coordinates to log; empty means all of them.
    pub log_coords: Vec<usize>,
}

impl RobbinsMonro {
    pub fn new(schedule: StepSchedule, compacts: CompactFamily) -> Result<Self> {
        schedule.validate()?;
        compacts.validate()?;
        Ok(RobbinsMonro {
            schedule,
            compacts,
            log_every: 1000,
            log_coords: Vec::new(),
        })
    }

    pub fn with_log(mut self, every: u64, coords: Vec<usize>) -> Self {
        self.log_every = every;
        self.log_coords = coords;
        self
    }

    /// Run `steps` iterations from `initial`, returning the final state and
    /// the decimated trajectory.
    pub fn run<P: StochasticGradient + ?Sized, R: RngCore>(
        &self,
        problem: &P,
        initial: Vec<f64>,
        steps: u64,
        rng: &mut R,
    ) -> Result<(OptimizerState, Vec<TrajectoryPoint>)> {
        let mut log = Vec::new();
        let state = self.run_with(problem, initial, steps, rng, |s| log.push(self.snapshot(s)))?;
        Ok((state, log))
    }

    /// Like [`run`](Self::run) but hands each logged state to `observe`.
    pub fn run_with<P, R, F>(
        &self,
        problem: &P,
        initial: Vec<f64>,
        steps: u64,
        rng: &mut R,
        mut observe: F,
    ) -> Result<OptimizerState>
    where
        P: StochasticGradient + ?Sized,
        R: RngCore,
        F: FnMut(&OptimizerState),
    {
        if steps == 0 {
            return Err(Error::invalid("steps", "must be at least 1"));
        }
        if initial.len() != problem.dim() {
            return Err(Error::DimensionMismatch {
                expected: problem.dim(),
                found: initial.len(),
            });
        }
        let mut state = OptimizerState::new(initial, &self.compacts)?;
        let mut grad = vec![0.0; problem.dim()];
        for _ in 0..steps {
            problem.sample_gradient(&state.alpha, rng, &mut grad)?;
            state.step(&grad, &self.schedule, &self.compacts)?;
            if self.log_every > 0 && (state.gamma % self.log_every == 0 || state.gamma == steps) {
                observe(&state);
            }
        }
        Ok(state)
    }

    fn snapshot(&self, state: &OptimizerState) -> TrajectoryPoint {
        let coords = if self.log_coords.is_empty() {
            state.alpha.clone()
        } else {
            self.log_coords.iter().map(|&i| state.alpha[i]).collect()
        };
        TrajectoryPoint {
            gamma: state.gamma,
            level: state.level,
            reinits: state.reinits,
            coords,
        }
    }
}

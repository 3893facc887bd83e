//! Bid-ask cost functions `Ψ(b, π)`: the cash paid to trade `π` bonds whose
//! mid price is `b`.
//!
//! Every model factors as `Ψ(b, π) = b f(π)` with the unit cost
//! `f(π) = π + λ (|π| - C)_+`. Perfect liquidity is `λ = 0`, the proportional
//! spread is `C = 0`. The smoothed variant replaces `f` by its convolution
//! with a centered Gaussian kernel of variance `ε`.

use crate::error::{Error, Result};
use crate::math::{norm_cdf, norm_pdf, sqrt};

/// Bisection iteration cap for smoothed inverses.
pub const MAX_BISECTIONS: usize = 200;
/// Relative tolerance of smoothed inverses.
pub const INVERSE_TOLERANCE: f64 = 1e-12;
/// Bracket width, in bonds, below which the smoothed inverse stops even when
/// the root is at or near zero.
pub const QUANTITY_FLOOR: f64 = 1e-18;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(
    feature = "serde",
    serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)
)]
pub enum CostModel {
    /// Trades at the mid price.
    Perfect,
    /// `(1 + λ sign π) b π`.
    Proportional { lambda: f64 },
    /// Mid price for `|π| ≤ C`, spread `λ` on the excess.
    Threshold {
        lambda: f64,
        #[cfg_attr(feature = "serde", serde(rename = "C"))]
        size: f64,
    },
    /// Gaussian convolution (variance `epsilon`) of the threshold form.
    Smoothed {
        lambda: f64,
        #[cfg_attr(feature = "serde", serde(rename = "C"))]
        size: f64,
        epsilon: f64,
    },
}

impl CostModel {
    pub fn validate(&self) -> Result<()> {
        let (lambda, size) = self.spread();
        if !(0.0..1.0).contains(&lambda) {
            return Err(Error::invalid("lambda", "must lie in [0, 1)"));
        }
        if !(size >= 0.0 && size.is_finite()) {
            return Err(Error::invalid("C", "must be non-negative and finite"));
        }
        if let CostModel::Smoothed { epsilon, .. } = *self {
            if !(epsilon > 0.0 && epsilon.is_finite()) {
                return Err(Error::invalid("epsilon", "must be positive and finite"));
            }
        }
        Ok(())
    }

    /// `(λ, C)` of the underlying piecewise-linear form.
    pub fn spread(&self) -> (f64, f64) {
        match *self {
            CostModel::Perfect => (0.0, 0.0),
            CostModel::Proportional { lambda } => (lambda, 0.0),
            CostModel::Threshold { lambda, size } | CostModel::Smoothed { lambda, size, .. } => {
                (lambda, size)
            }
        }
    }

    pub fn is_smoothed(&self) -> bool {
        matches!(self, CostModel::Smoothed { .. })
    }

    /// Cash paid for `pi` bonds of mid price `b`.
    pub fn cost(&self, b: f64, pi: f64) -> Result<f64> {
        check_price(b)?;
        Ok(b * self.unit_cost(pi))
    }

    /// Quantity whose cost is `y`.
    pub fn cost_inverse(&self, b: f64, y: f64) -> Result<f64> {
        check_price(b)?;
        self.unit_inverse(y / b)
    }

    /// A positive subgradient of the cost in `pi`: right derivative at kinks,
    /// `b` at the origin of the proportional form.
    pub fn cost_derivative(&self, b: f64, pi: f64) -> Result<f64> {
        check_price(b)?;
        Ok(b * self.unit_slope(pi))
    }

    pub(crate) fn unit_cost(&self, pi: f64) -> f64 {
        let (lambda, size) = self.spread();
        if lambda == 0.0 {
            return pi;
        }
        match *self {
            CostModel::Smoothed { epsilon, .. } => {
                let s = sqrt(epsilon);
                pi + lambda * (call_value(pi - size, s) + call_value(-pi - size, s))
            }
            _ => pi + lambda * (pi.abs() - size).max(0.0),
        }
    }

    pub(crate) fn unit_slope(&self, pi: f64) -> f64 {
        let (lambda, size) = self.spread();
        if lambda == 0.0 {
            return 1.0;
        }
        match *self {
            CostModel::Smoothed { epsilon, .. } => {
                let s = sqrt(epsilon);
                1.0 + lambda * (norm_cdf((pi - size) / s) - norm_cdf((-pi - size) / s))
            }
            _ => {
                if pi > size || (pi == size && size > 0.0) {
                    1.0 + lambda
                } else if pi < -size {
                    1.0 - lambda
                } else {
                    // Inside [-C, C), or the origin of the proportional form.
                    1.0
                }
            }
        }
    }

    pub(crate) fn unit_inverse(&self, u: f64) -> Result<f64> {
        let (lambda, size) = self.spread();
        if lambda == 0.0 {
            return Ok(u);
        }
        match *self {
            CostModel::Smoothed { .. } => self.smoothed_inverse(u),
            _ => Ok(if u > size {
                size + (u - size) / (1.0 + lambda)
            } else if u < -size {
                -size + (u + size) / (1.0 - lambda)
            } else {
                u
            }),
        }
    }

    fn smoothed_inverse(&self, u: f64) -> Result<f64> {
        let f = |x: f64| self.unit_cost(x) - u;
        // The kinked inverse is within a few kernel widths of the answer.
        let guess = CostModel::Threshold {
            lambda: self.spread().0,
            size: self.spread().1,
        }
        .unit_inverse(u)?;
        let mut width = u.abs().max(1e-12);
        let (mut lo, mut hi) = (guess - width, guess + width);
        let mut grown = 0;
        while f(lo) > 0.0 || f(hi) < 0.0 {
            width *= 2.0;
            lo = guess - width;
            hi = guess + width;
            grown += 1;
            if grown > MAX_BISECTIONS || !width.is_finite() {
                return Err(Error::NoConvergence { target: u });
            }
        }
        for _ in 0..MAX_BISECTIONS {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                return Ok(mid);
            }
            let v = f(mid);
            if v == 0.0 {
                return Ok(mid);
            }
            if v < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            let tol = (INVERSE_TOLERANCE * 1e-3 * mid.abs().max(u.abs())).max(QUANTITY_FLOOR);
            if hi - lo <= tol {
                return Ok(0.5 * (lo + hi));
            }
        }
        Err(Error::NoConvergence { target: u })
    }

    /// Distance from `pi` to the nearest kink of a piecewise-linear model
    /// (infinite for smooth or linear models).
    pub fn kink_distance(&self, pi: f64) -> f64 {
        let (lambda, size) = self.spread();
        if lambda == 0.0 || self.is_smoothed() {
            return f64::INFINITY;
        }
        (pi.abs() - size).abs()
    }
}

/// `E[(m + s Z)_+]` for standard normal `Z`.
fn call_value(m: f64, s: f64) -> f64 {
    let z = m / s;
    m * norm_cdf(z) + s * norm_pdf(z)
}

fn check_price(b: f64) -> Result<()> {
    if b > 0.0 && b.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositivePrice(b))
    }
}

/// Gaussian-smoothed version of a piecewise-linear model.
pub fn smooth(model: &CostModel, epsilon: f64) -> Result<CostModel> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::invalid("epsilon", "must be positive and finite"));
    }
    if model.is_smoothed() {
        return Err(Error::invalid("model", "already smoothed"));
    }
    let (lambda, size) = model.spread();
    Ok(CostModel::Smoothed {
        lambda,
        size,
        epsilon,
    })
}

/// Quantity of the last-maturity bond that balances a trade date: the cash
/// `inflow` (maturing bonds plus the swap payoff) minus what the other legs
/// cost must equal the cost of the solved leg.
pub fn solve_self_financing(
    model: &CostModel,
    bond_price: f64,
    inflow: f64,
    other_legs_cost: f64,
) -> Result<f64> {
    model.cost_inverse(bond_price, inflow - other_legs_cost)
}

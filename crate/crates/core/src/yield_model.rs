//! One-factor Vasicek short rate, zero-coupon bonds and swap cash flows.
//!
//! The short rate follows `dR = A (r_inf - R) dθ + σ dB` and is treated as
//! risk-neutral, so bond prices take the usual affine form
//! `B(τ, r) = exp(-a(τ) - b(τ) r)`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::{exp, expm1, sqrt};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct VasicekParams {
    /// Speed of mean reversion `A` (1/year).
    pub mean_reversion: f64,
    /// Long-run level `r_inf`.
    pub long_run_level: f64,
    /// Volatility `σ` (rate per square-root year).
    pub volatility: f64,
    /// Short rate observed at the agreement date.
    pub initial_rate: f64,
}

impl Default for VasicekParams {
    fn default() -> Self {
        VasicekParams {
            mean_reversion: 0.10,
            long_run_level: 0.05,
            volatility: 0.05,
            initial_rate: 0.05,
        }
    }
}

impl VasicekParams {
    pub fn new(
        mean_reversion: f64,
        long_run_level: f64,
        volatility: f64,
        initial_rate: f64,
    ) -> Result<Self> {
        let p = VasicekParams {
            mean_reversion,
            long_run_level,
            volatility,
            initial_rate,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mean_reversion > 0.0 && self.mean_reversion.is_finite()) {
            return Err(Error::invalid(
                "mean_reversion",
                "must be positive and finite",
            ));
        }
        if !(self.volatility >= 0.0 && self.volatility.is_finite()) {
            return Err(Error::invalid(
                "volatility",
                "must be non-negative and finite",
            ));
        }
        if !self.long_run_level.is_finite() {
            return Err(Error::invalid("long_run_level", "must be finite"));
        }
        if !self.initial_rate.is_finite() {
            return Err(Error::invalid("initial_rate", "must be finite"));
        }
        Ok(())
    }

    /// Rate loading `b(τ) = (1 - e^{-Aτ}) / A`.
    pub fn rate_loading(&self, tau: f64) -> f64 {
        -expm1(-self.mean_reversion * tau) / self.mean_reversion
    }

    /// Deterministic part `a(τ)` of minus the log bond price.
    pub fn log_price_offset(&self, tau: f64) -> f64 {
        let a = self.mean_reversion;
        let s2 = self.volatility * self.volatility;
        let b = self.rate_loading(tau);
        (self.long_run_level - s2 / (2.0 * a * a)) * (tau - b) + s2 * b * b / (4.0 * a)
    }

    /// Price at rate `rate` of a zero-coupon bond with residual maturity `tau`.
    pub fn bond_price(&self, rate: f64, tau: f64) -> f64 {
        if tau == 0.0 {
            return 1.0;
        }
        exp(-self.log_price_offset(tau) - self.rate_loading(tau) * rate)
    }

    /// Standard deviation of the exact OU transition over `eta`.
    pub fn transition_std(&self, eta: f64) -> f64 {
        let a = self.mean_reversion;
        self.volatility * sqrt(-expm1(-2.0 * a * eta) / (2.0 * a))
    }

    /// Conditional mean of `R_{u+eta}` given `R_u = r_prev`.
    pub fn transition_mean(&self, r_prev: f64, eta: f64) -> f64 {
        self.long_run_level + exp(-self.mean_reversion * eta) * (r_prev - self.long_run_level)
    }

    /// Exact transition of the short rate over `eta` driven by the standard
    /// normal draw `g`.
    pub fn advance_rate(&self, r_prev: f64, eta: f64, g: f64) -> f64 {
        self.transition_mean(r_prev, eta) + g * self.transition_std(eta)
    }
}

/// Agreement date `t` followed by payment dates `T_0 < … < T_N`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TenorStructure {
    agreement_date: f64,
    dates: Vec<f64>,
}

impl TenorStructure {
    pub fn new(agreement_date: f64, dates: Vec<f64>) -> Result<Self> {
        if dates.len() < 2 {
            return Err(Error::invalid("dates", "need at least T_0 and T_1"));
        }
        if !agreement_date.is_finite() || dates.iter().any(|d| !d.is_finite()) {
            return Err(Error::invalid("dates", "must be finite"));
        }
        if agreement_date > dates[0] {
            return Err(Error::invalid("agreement_date", "must not exceed T_0"));
        }
        if dates.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("dates", "must be strictly increasing"));
        }
        Ok(TenorStructure {
            agreement_date,
            dates,
        })
    }

    /// `t = 0`, `T_i = first + i * spacing` for `i = 0..=num_periods`.
    pub fn regular(num_periods: usize, first: f64, spacing: f64) -> Result<Self> {
        let dates = (0..=num_periods)
            .map(|i| first + i as f64 * spacing)
            .collect();
        Self::new(0.0, dates)
    }

    /// Annual schedule `t = 0`, `T_i = 1 + i`.
    pub fn annual(num_periods: usize) -> Result<Self> {
        Self::regular(num_periods, 1.0, 1.0)
    }

    pub fn agreement_date(&self) -> f64 {
        self.agreement_date
    }

    pub fn dates(&self) -> &[f64] {
        &self.dates
    }

    /// Number of payment periods `N`.
    pub fn num_periods(&self) -> usize {
        self.dates.len() - 1
    }

    /// `T_i - T_{i-1}` for `1 ≤ i ≤ N`.
    pub fn accrual(&self, i: usize) -> f64 {
        self.dates[i] - self.dates[i - 1]
    }

    /// Calendar time of trade slot `s`: slot 0 is the agreement date, slot
    /// `s ≥ 1` is `T_{s-1}`.
    pub fn slot_time(&self, slot: usize) -> f64 {
        if slot == 0 {
            self.agreement_date
        } else {
            self.dates[slot - 1]
        }
    }

    /// Length of the interval ending at `T_k` (`T_{-1} = t`).
    pub fn step_length(&self, k: usize) -> f64 {
        self.dates[k] - self.slot_time(k)
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SwapSpec {
    pub tenor: TenorStructure,
    pub fixed_rate: f64,
    pub notional: f64,
}

impl SwapSpec {
    /// Unit-notional receiver swap struck at the money.
    pub fn at_the_money(params: &VasicekParams, tenor: TenorStructure) -> Self {
        let fixed_rate = at_the_money_rate(params, &tenor);
        SwapSpec {
            tenor,
            fixed_rate,
            notional: 1.0,
        }
    }

    pub fn num_periods(&self) -> usize {
        self.tenor.num_periods()
    }
}

/// Simple forward rate over `[t_begin, t_end]` implied by two discount factors.
pub fn forward_rate(b_near: f64, b_far: f64, t_begin: f64, t_end: f64) -> Result<f64> {
    if b_far.is_nan() || b_far <= 0.0 {
        return Err(Error::NonPositivePrice(b_far));
    }
    if t_end.is_nan() || t_begin.is_nan() || t_end <= t_begin {
        return Err(Error::invalid("t_end", "must exceed t_begin"));
    }
    Ok((b_near / b_far - 1.0) / (t_end - t_begin))
}

/// Fixed rate that gives the swap zero value at the agreement date.
pub fn at_the_money_rate(params: &VasicekParams, tenor: &TenorStructure) -> f64 {
    let t = tenor.agreement_date();
    let r0 = params.initial_rate;
    let discount = |ti: f64| params.bond_price(r0, ti - t);
    let n = tenor.num_periods();
    let annuity: f64 = (1..=n)
        .map(|i| tenor.accrual(i) * discount(tenor.dates()[i]))
        .sum();
    (discount(tenor.dates()[0]) - discount(tenor.dates()[n])) / annuity
}

/// Receiver payoff `r δ - 1/B(T_{i-1}, T_i) + 1` at `T_i`, unit notional.
pub fn swap_payoff(fixed_rate: f64, accrual: f64, b_prev: f64) -> Result<f64> {
    if b_prev.is_nan() || b_prev <= 0.0 {
        return Err(Error::NonPositivePrice(b_prev));
    }
    Ok(fixed_rate * accrual - 1.0 / b_prev + 1.0)
}

/// Loadings of `R_{T_k}` on the innovations `G^(0..=k)`: `R_{T_k}` equals
/// [`expected_rate`] plus `Σ_l c_l G^(l)`.
pub fn rate_loadings(params: &VasicekParams, tenor: &TenorStructure, k: usize) -> Vec<f64> {
    let dates = tenor.dates();
    (0..=k)
        .map(|l| {
            exp(-params.mean_reversion * (dates[k] - dates[l]))
                * params.transition_std(tenor.step_length(l))
        })
        .collect()
}

/// Unconditional mean of `R_{T_k}` given the initial rate.
pub fn expected_rate(params: &VasicekParams, tenor: &TenorStructure, k: usize) -> f64 {
    (0..=k).fold(params.initial_rate, |m, l| {
        params.transition_mean(m, tenor.step_length(l))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn zero_maturity_bond_is_par() {
        let p = VasicekParams::default();
        assert_eq!(p.bond_price(0.3, 0.0), 1.0);
        assert_eq!(p.bond_price(-0.1, 0.0), 1.0);
    }

    #[test]
    fn deterministic_flat_curve() {
        let p = VasicekParams::new(0.1, 0.05, 0.0, 0.05).unwrap();
        for tau in [0.5, 1.0, 7.0, 30.0] {
            assert_relative_eq!(
                p.bond_price(0.05, tau),
                (-0.05 * tau).exp(),
                max_relative = 1e-13
            );
        }
    }

    #[test]
    fn ten_year_yield_in_range() {
        let p = VasicekParams::default();
        let y = -p.bond_price(0.05, 10.0).ln() / 10.0;
        assert!((0.028..=0.05).contains(&y), "yield {y}");
    }

    #[test]
    fn yields_between_three_and_five_percent() {
        let p = VasicekParams::default();
        for t in 1..=10 {
            let y = -p.bond_price(0.05, t as f64).ln() / t as f64;
            assert!((0.028..=0.051).contains(&y), "T={t} yield {y}");
        }
    }

    #[test]
    fn advance_rate_limits() {
        let p = VasicekParams::default();
        assert_relative_eq!(p.advance_rate(0.2, 1e4, 0.0), 0.05, epsilon = 1e-15);
        let det = VasicekParams::new(0.1, 0.05, 0.0, 0.05).unwrap();
        let want = 0.05 + (-0.1f64 * 2.5).exp() * (0.09 - 0.05);
        assert_relative_eq!(det.advance_rate(0.09, 2.5, 1.7), want, epsilon = 1e-15);
    }

    #[test]
    fn advance_rate_reference_value() {
        let p = VasicekParams::default();
        let want = 0.05 + 0.05 * ((1.0 - (-0.2f64).exp()) / 0.2).sqrt();
        assert_relative_eq!(p.advance_rate(0.05, 1.0, 1.0), want, max_relative = 1e-14);
    }

    #[test]
    fn advance_rate_is_affine_in_draw() {
        let p = VasicekParams::default();
        let f = |g| p.advance_rate(0.03, 0.7, g);
        let slope = f(1.0) - f(0.0);
        for g in [-2.0, -0.3, 0.4, 3.1] {
            assert_relative_eq!(f(g), f(0.0) + slope * g, epsilon = 1e-15);
        }
    }

    #[test]
    fn forward_rate_cases() {
        assert_eq!(forward_rate(0.8, 0.8, 1.0, 2.0).unwrap(), 0.0);
        assert_eq!(forward_rate(1.0, 0.5, 3.0, 4.0).unwrap(), 1.0);
        assert!(matches!(
            forward_rate(1.0, 0.0, 0.0, 1.0),
            Err(Error::NonPositivePrice(_))
        ));
        assert!(forward_rate(1.0, 0.9, 1.0, 1.0).is_err());
    }

    #[test]
    fn forward_rate_matches_bond_ratio() {
        // Forward fixed at T_B: near bond is B(T_B, T_B) = 1.
        let p = VasicekParams::default();
        let b = p.bond_price(0.047, 1.0);
        let l = forward_rate(1.0, b, 1.0, 2.0).unwrap();
        assert_relative_eq!(l, 1.0 / b - 1.0, max_relative = 1e-14);
    }

    #[test]
    fn swap_payoff_cases() {
        assert_relative_eq!(
            swap_payoff(0.05, 1.0, 1.0 / 1.05).unwrap(),
            0.0,
            epsilon = 1e-15
        );
        assert_eq!(swap_payoff(0.0, 1.0, 1.0).unwrap(), 0.0);
        let v = swap_payoff(0.05, 1.0, 0.9).unwrap();
        assert_relative_eq!(v, 0.05 - 1.0 / 0.9 + 1.0, epsilon = 1e-16);
        assert!(v < -0.061 && v > -0.0612);
        assert!(swap_payoff(0.05, 1.0, 0.0).is_err());
    }

    #[test]
    fn payoff_two_forms_agree() {
        // P = δ (r - L) with L from the forward formula.
        let p = VasicekParams::default();
        for (i, r) in [0.01, 0.05, 0.12, -0.01].into_iter().enumerate() {
            let delta = 0.5 + i as f64 * 0.25;
            let b = p.bond_price(r, delta);
            let l = forward_rate(1.0, b, 0.0, delta).unwrap();
            let direct = swap_payoff(0.04, delta, b).unwrap();
            assert_relative_eq!(direct, delta * (0.04 - l), max_relative = 1e-12);
        }
    }

    #[test]
    fn atm_rate_flat_curve_closed_form() {
        let p = VasicekParams::new(0.1, 0.05, 0.0, 0.05).unwrap();
        let tenor = TenorStructure::annual(4).unwrap();
        let r = at_the_money_rate(&p, &tenor);
        let d = |t: f64| (-0.05 * t).exp();
        let annuity: f64 = (1..=4).map(|i| d(1.0 + i as f64)).sum();
        assert_relative_eq!(r * annuity, d(1.0) - d(5.0), max_relative = 1e-13);
    }

    #[test]
    fn atm_rate_single_period_par() {
        let p = VasicekParams::default();
        let tenor = TenorStructure::new(1.0, alloc::vec![1.0, 2.5]).unwrap();
        let r = at_the_money_rate(&p, &tenor);
        let b = p.bond_price(p.initial_rate, 1.5);
        assert_relative_eq!(r, (1.0 / b - 1.0) / 1.5, max_relative = 1e-13);
    }

    #[test]
    fn atm_rate_default_two_periods() {
        let p = VasicekParams::default();
        let r = at_the_money_rate(
            &p,
            &TenorStructure::new(0.0, alloc::vec![1.0, 2.0, 3.0]).unwrap(),
        );
        assert!(r > 0.0 && r < 0.05, "r = {r}");
    }

    #[test]
    fn loadings_reproduce_simulated_rate() {
        let p = VasicekParams::default();
        let tenor = TenorStructure::new(0.0, alloc::vec![0.5, 1.0, 2.5, 3.0]).unwrap();
        let g = [0.3, -1.2, 0.7, 2.0];
        let mut r = p.initial_rate;
        for k in 0..4 {
            r = p.advance_rate(r, tenor.step_length(k), g[k]);
            let c = rate_loadings(&p, &tenor, k);
            let affine =
                expected_rate(&p, &tenor, k) + c.iter().zip(&g).map(|(c, g)| c * g).sum::<f64>();
            assert_relative_eq!(r, affine, epsilon = 1e-15);
        }
    }

    #[test]
    fn tenor_validation() {
        assert!(TenorStructure::new(0.0, alloc::vec![1.0]).is_err());
        assert!(TenorStructure::new(2.0, alloc::vec![1.0, 2.0]).is_err());
        assert!(TenorStructure::new(0.0, alloc::vec![1.0, 1.0, 2.0]).is_err());
        let t = TenorStructure::annual(3).unwrap();
        assert_eq!(t.num_periods(), 3);
        assert_eq!(t.slot_time(0), 0.0);
        assert_eq!(t.slot_time(2), 2.0);
        assert_eq!(t.accrual(3), 1.0);
        assert_eq!(t.step_length(0), 1.0);
    }

    #[test]
    fn params_validation() {
        assert!(VasicekParams::new(0.0, 0.05, 0.05, 0.05).is_err());
        assert!(VasicekParams::new(0.1, 0.05, -0.01, 0.05).is_err());
        assert!(VasicekParams::new(0.1, f64::NAN, 0.05, 0.05).is_err());
    }
}

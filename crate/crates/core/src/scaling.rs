//! Model inputs, the scaled coordinates `(beta, rho)` and the closed-form
//! limit and fluctuation quantities of the discrete average.
//!
//! The asymptotics hold `beta = sigma^2 tau n^2 / 2` and `rho = (r - q) tau n`
//! fixed while the number of fixings grows. Every formula downstream is
//! written in these coordinates.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Below this `|rho|` the average limit uses its Taylor series.
pub const RHO_SERIES_THRESHOLD: f64 = 1e-4;

/// Below this `|rho|` the variance factors use their power series. The direct
/// formulas lose `eps / rho^2` relative accuracy, so the switch sits well away
/// from zero.
pub const VARIANCE_SERIES_THRESHOLD: f64 = 0.5;

/// Black-Scholes model inputs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarketParams {
    pub spot: f64,
    pub rate: f64,
    pub dividend: f64,
    pub sigma: f64,
}

impl MarketParams {
    pub fn new(spot: f64, rate: f64, dividend: f64, sigma: f64) -> Result<Self> {
        if !(spot.is_finite() && spot > 0.0) {
            return Err(domain(format!("spot must be positive, got {spot}")));
        }
        if !(sigma.is_finite() && sigma >= 0.0) {
            return Err(domain(format!("sigma must be non-negative, got {sigma}")));
        }
        if !rate.is_finite() || !dividend.is_finite() {
            return Err(domain("rate and dividend must be finite"));
        }
        Ok(Self {
            spot,
            rate,
            dividend,
            sigma,
        })
    }

    /// The measure used for floating-strike pricing: drift `q - r`,
    /// discounting at `q`. Swapping the two rates produces exactly that.
    pub fn starred(&self) -> Self {
        Self {
            rate: self.dividend,
            dividend: self.rate,
            ..*self
        }
    }
}

/// Uniform fixing schedule `t_i = i * tau`, `i = 1..=n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AveragingGrid {
    pub n: usize,
    pub tau: f64,
}

impl AveragingGrid {
    pub fn new(n: usize, tau: f64) -> Result<Self> {
        if n == 0 {
            return Err(domain("at least one fixing is required"));
        }
        if !(tau.is_finite() && tau > 0.0) {
            return Err(domain(format!("step must be positive, got {tau}")));
        }
        Ok(Self { n, tau })
    }

    /// `n` fixings spread evenly over `maturity`.
    pub fn from_maturity(n: usize, maturity: f64) -> Result<Self> {
        if n == 0 {
            return Err(domain("at least one fixing is required"));
        }
        Self::new(n, maturity / n as f64)
    }

    pub fn maturity(&self) -> f64 {
        self.n as f64 * self.tau
    }

    pub fn fixing_times(&self) -> impl Iterator<Item = f64> + '_ {
        (1..=self.n).map(move |i| i as f64 * self.tau)
    }
}

/// The fixed coordinates of the large-`n` limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaledParams {
    pub beta: f64,
    pub rho: f64,
}

impl ScaledParams {
    /// Direct construction for pure rate-function work.
    pub fn new(beta: f64, rho: f64) -> Result<Self> {
        if !(beta.is_finite() && beta >= 0.0) {
            return Err(domain(format!("beta must be non-negative, got {beta}")));
        }
        if !rho.is_finite() {
            return Err(domain("rho must be finite"));
        }
        Ok(Self { beta, rho })
    }

    pub fn from_market(market: &MarketParams, grid: &AveragingGrid) -> Self {
        scaled_params(market, grid)
    }
}

pub fn scaled_params(market: &MarketParams, grid: &AveragingGrid) -> ScaledParams {
    let n = grid.n as f64;
    ScaledParams {
        beta: 0.5 * market.sigma * market.sigma * grid.tau * n * n,
        rho: (market.rate - market.dividend) * grid.tau * n,
    }
}

/// `(e^rho - 1) / rho`, continuous at zero.
pub fn growth_factor(rho: f64) -> f64 {
    if rho.abs() < RHO_SERIES_THRESHOLD {
        1.0 + rho * (0.5 + rho * (1.0 / 6.0 + rho / 24.0))
    } else {
        rho.exp_m1() / rho
    }
}

/// Almost-sure limit of the discrete average, `S0 (e^rho - 1) / rho`.
pub fn a_infinity(spot: f64, rho: f64) -> f64 {
    spot * growth_factor(rho)
}

/// `E[A_n] = (S0 / n) sum_i e^{rho i / n}` in closed geometric-sum form.
pub fn discrete_forward(spot: f64, rho: f64, n: usize) -> f64 {
    if rho == 0.0 {
        return spot;
    }
    let n = n as f64;
    spot * rho.exp_m1() / (-n * (-rho / n).exp_m1())
}

/// `rho^{-2} int_0^1 (1 - e^{rho x})^2 dx`; equals `1/3` at zero.
fn squared_gap_integral(rho: f64) -> f64 {
    if rho.abs() < VARIANCE_SERIES_THRESHOLD {
        // sum_{k>=2} (2^k - 2) rho^{k-2} / (k+1)!
        let mut sum = 0.0;
        let mut power = 1.0;
        let mut factorial = 6.0;
        let mut two_k = 4.0;
        for k in 2..30 {
            sum += (two_k - 2.0) * power / factorial;
            power *= rho;
            two_k *= 2.0;
            factorial *= (k + 2) as f64;
        }
        sum
    } else {
        let e1 = rho.exp_m1();
        let e2 = (2.0 * rho).exp_m1();
        (1.0 - 2.0 * e1 / rho + e2 / (2.0 * rho)) / (rho * rho)
    }
}

/// Limit variance factor `v(rho)`: `sqrt(n) (A_n - A_inf) / S0` tends to a
/// centred normal with variance `2 beta v(rho)`.
pub fn fluctuation_variance(rho: f64) -> f64 {
    (2.0 * rho).exp() * squared_gap_integral(-rho)
}

/// Variance `s^2` of the at-the-money floating-strike fluctuation.
pub fn floating_atm_variance(beta: f64, rho: f64) -> f64 {
    2.0 * beta * squared_gap_integral(rho)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v_direct(a: f64) -> f64 {
        let e2 = (2.0 * a).exp();
        (a * e2 - 1.5 * e2 + 2.0 * a.exp() - 0.5) / (a * a * a)
    }

    #[test]
    fn benchmark_scenario_one_coordinates() {
        let m = MarketParams::new(2.0, 0.02, 0.0, 0.1).unwrap();
        let g = AveragingGrid::new(250, 1.0 / 250.0).unwrap();
        let s = scaled_params(&m, &g);
        assert!((s.beta - 1.25).abs() < 1e-12);
        assert!((s.rho - 0.02).abs() < 1e-15);
    }

    #[test]
    fn zero_vol_and_zero_drift() {
        let g = AveragingGrid::new(17, 0.3).unwrap();
        let s = scaled_params(&MarketParams::new(1.0, 0.03, 0.03, 0.0).unwrap(), &g);
        assert_eq!(s.beta, 0.0);
        assert_eq!(s.rho, 0.0);
    }

    #[test]
    fn invalid_inputs_rejected() {
        assert!(MarketParams::new(0.0, 0.0, 0.0, 0.1).is_err());
        assert!(MarketParams::new(1.0, 0.0, 0.0, -0.1).is_err());
        assert!(MarketParams::new(1.0, f64::NAN, 0.0, 0.1).is_err());
        assert!(AveragingGrid::new(0, 0.1).is_err());
        assert!(AveragingGrid::new(3, 0.0).is_err());
        assert!(ScaledParams::new(-1.0, 0.0).is_err());
    }

    #[test]
    fn beta_inverts_to_sigma() {
        let m = MarketParams::new(1.0, 0.0, 0.0, 0.237).unwrap();
        let g = AveragingGrid::new(365, 0.004).unwrap();
        let s = scaled_params(&m, &g);
        let n = g.n as f64;
        let sigma = (2.0 * s.beta / (g.tau * n * n)).sqrt();
        assert!((sigma - 0.237).abs() < 1e-15);
    }

    #[test]
    fn a_infinity_values() {
        assert_eq!(a_infinity(1.0, 0.0), 1.0);
        // 50-digit reference
        assert!((a_infinity(2.0, 0.02) - 2.020_134_002_675_581).abs() < 1e-14);
        assert!((a_infinity(100.0, 0.25) - 113.610_166_675_096_6).abs() < 1e-11);
    }

    #[test]
    fn a_infinity_branches_meet() {
        for &r in &[1e-9f64, 1e-7, 1e-5, 9.99e-5, 1e-4, 1.01e-4, 1e-3] {
            for &s in &[r, -r] {
                let series = 1.0 + s * (0.5 + s * (1.0 / 6.0 + s / 24.0));
                let direct = s.exp_m1() / s;
                assert!((series - direct).abs() < 1e-12, "rho={s}");
                assert!(a_infinity(1.0, s) >= 1f64.min(s.exp()));
            }
        }
    }

    #[test]
    fn fluctuation_variance_values() {
        assert!((fluctuation_variance(0.0) - 1.0 / 3.0).abs() < 1e-16);
        assert!((fluctuation_variance(0.1) - 0.377_974_727_057_482_1).abs() < 1e-12);
        assert!((fluctuation_variance(-0.1) - 0.294_368_852_851_827_5).abs() < 1e-12);
        assert!((fluctuation_variance(0.1) - v_direct(0.1)).abs() < 1e-12);
    }

    #[test]
    fn fluctuation_variance_branches_meet_and_stay_positive() {
        let t = VARIANCE_SERIES_THRESHOLD;
        for &r in &[t * (1.0 - 1e-12), t, t * (1.0 + 1e-12)] {
            for &s in &[r, -r] {
                assert!((fluctuation_variance(s) - v_direct(s)).abs() < 1e-10);
            }
        }
        for i in 0..=1000 {
            let r = -5.0 + 0.01 * i as f64;
            assert!(fluctuation_variance(r) > 0.0, "rho={r}");
        }
        // small-rho Taylor slope 5/12
        let r = 1e-6;
        assert!(((fluctuation_variance(r) - 1.0 / 3.0) / r - 5.0 / 12.0).abs() < 1e-5);
    }

    #[test]
    fn discrete_forward_values() {
        assert_eq!(discrete_forward(1.0, 0.0, 50), 1.0);
        let explicit: f64 = (1..=250).map(|i| (0.02 * i as f64 / 250.0).exp()).sum::<f64>() * 2.0 / 250.0;
        assert!((discrete_forward(2.0, 0.02, 250) - explicit).abs() < 1e-13);
        // first-order gap S0 (e^rho - 1) / (2n)
        let gap = discrete_forward(2.0, 0.02, 1_000_000) - a_infinity(2.0, 0.02);
        assert!((gap - 2.0 * 0.02f64.exp_m1() / 2e6).abs() < 1e-12);
    }

    #[test]
    fn discrete_forward_decreases_to_limit() {
        for &rho in &[0.05, 0.5, 2.0] {
            let limit = a_infinity(1.0, rho);
            let mut prev = f64::INFINITY;
            for &n in &[10, 100, 1000, 10_000] {
                let f = discrete_forward(1.0, rho, n);
                assert!(f > limit && f < prev);
                prev = f;
            }
        }
    }

    #[test]
    fn floating_atm_variance_values() {
        assert!((floating_atm_variance(1.0, 1e-6) - 2.0 / 3.0).abs() < 1e-6);
        assert!((floating_atm_variance(1.0, 0.0) - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(floating_atm_variance(0.0, 0.3), 0.0);
        // mpmath reference for rho = 0.1
        assert!((floating_atm_variance(1.0, 0.1) - 0.719_085_857_579_334_7).abs() < 1e-12);
        let half = floating_atm_variance(1.0, 1e-7) / 2.0;
        assert!((half - fluctuation_variance(1e-7)).abs() < 1e-6);
    }
}

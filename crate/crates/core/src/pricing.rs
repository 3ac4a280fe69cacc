//! Asian option prices from the rate function.
//!
//! The headline price plugs the equivalent log-normal volatility
//! `Sigma_LN(K)` into Black-Scholes with forward `A_inf`. The raw
//! large-deviation forms (`otm_decay`, `itm_expansion`,
//! `atm_price_asymptotic`) are exposed next to it.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};
use statrs::distribution::{Continuous, ContinuousCDF, Normal};

use crate::error::{domain, Error, Result};
use crate::scaling::{
    a_infinity, floating_atm_variance, fluctuation_variance, growth_factor, scaled_params,
    AveragingGrid, MarketParams,
};
use crate::variational::{rate_j, RateValue, VariationalConfig};

/// `|log(K / A_inf)|` below which a strike counts as at the money.
pub const ATM_LOG_THRESHOLD: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    Call,
    Put,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Style {
    /// Payoff `(A_n - K)^+` for a call.
    Fixed { strike: f64 },
    /// Payoff `(kappa S_T - A_n)^+` for a call.
    Floating { kappa: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptionSpec {
    pub flavor: Flavor,
    pub style: Style,
}

impl OptionSpec {
    pub fn fixed(flavor: Flavor, strike: f64) -> Self {
        Self { flavor, style: Style::Fixed { strike } }
    }

    pub fn floating(flavor: Flavor, kappa: f64) -> Self {
        Self { flavor, style: Style::Floating { kappa } }
    }

    pub fn strike(&self) -> Option<f64> {
        match self.style {
            Style::Fixed { strike } => Some(strike),
            Style::Floating { .. } => None,
        }
    }

    pub fn kappa(&self) -> Option<f64> {
        match self.style {
            Style::Floating { kappa } => Some(kappa),
            Style::Fixed { .. } => None,
        }
    }

    /// Undiscounted payoff on one realised path.
    pub fn payoff(&self, average: f64, terminal: f64) -> f64 {
        let (long, short) = match self.style {
            Style::Fixed { strike } => (average, strike),
            Style::Floating { kappa } => (kappa * terminal, average),
        };
        match self.flavor {
            Flavor::Call => (long - short).max(0.0),
            Flavor::Put => (short - long).max(0.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    #[serde(rename = "OTM")]
    Otm,
    #[serde(rename = "ATM")]
    Atm,
    #[serde(rename = "ITM")]
    Itm,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::Otm => "OTM",
            Regime::Atm => "ATM",
            Regime::Itm => "ITM",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PriceResult {
    pub price: f64,
    pub regime: Regime,
    pub implied_ln_vol: f64,
    pub implied_n_vol: f64,
    /// `n I(K)`, set out of the money only.
    pub decay_rate: Option<f64>,
    pub diagnostics: RateValue,
}

fn std_normal() -> Normal {
    Normal::standard()
}

pub(crate) fn norm_cdf(x: f64) -> f64 {
    std_normal().cdf(x)
}

pub(crate) fn norm_pdf(x: f64) -> f64 {
    std_normal().pdf(x)
}

pub(crate) fn norm_inv_cdf(p: f64) -> f64 {
    std_normal().inverse_cdf(p)
}

/// Undiscounted Black-Scholes value on a forward.
pub fn bs_kernel(forward: f64, strike: f64, vol_sqrt_t: f64, flavor: Flavor) -> f64 {
    if vol_sqrt_t <= 0.0 {
        return match flavor {
            Flavor::Call => (forward - strike).max(0.0),
            Flavor::Put => (strike - forward).max(0.0),
        };
    }
    let d1 = ((forward / strike).ln() + 0.5 * vol_sqrt_t * vol_sqrt_t) / vol_sqrt_t;
    let d2 = d1 - vol_sqrt_t;
    match flavor {
        Flavor::Call => forward * norm_cdf(d1) - strike * norm_cdf(d2),
        Flavor::Put => strike * norm_cdf(-d2) - forward * norm_cdf(-d1),
    }
}

/// Undiscounted Bachelier value on a forward.
pub fn bachelier_kernel(forward: f64, strike: f64, normal_vol_sqrt_t: f64, flavor: Flavor) -> f64 {
    let m = match flavor {
        Flavor::Call => forward - strike,
        Flavor::Put => strike - forward,
    };
    if normal_vol_sqrt_t <= 0.0 {
        return m.max(0.0);
    }
    let d = m / normal_vol_sqrt_t;
    m * norm_cdf(d) + normal_vol_sqrt_t * norm_pdf(d)
}

/// Black-Scholes vega on a forward, per unit of volatility.
pub fn bs_vega(forward: f64, strike: f64, vol: f64, maturity: f64) -> f64 {
    let s = vol * maturity.sqrt();
    if s <= 0.0 {
        return 0.0;
    }
    let d1 = ((forward / strike).ln() + 0.5 * s * s) / s;
    forward * norm_pdf(d1) * maturity.sqrt()
}

/// Black-Scholes volatility that reproduces an undiscounted price on a
/// forward. At the money it inverts `C = F (2 Phi(w / 2) - 1)` directly.
pub fn implied_bs_vol(undiscounted: f64, forward: f64, strike: f64, maturity: f64, flavor: Flavor) -> Result<f64> {
    if !(forward > 0.0 && strike > 0.0 && maturity > 0.0) {
        return Err(domain("forward, strike and maturity must be positive"));
    }
    let intrinsic = bs_kernel(forward, strike, 0.0, flavor);
    let cap = match flavor {
        Flavor::Call => forward,
        Flavor::Put => strike,
    };
    if !(undiscounted > intrinsic && undiscounted < cap) {
        return Err(domain(format!(
            "price {undiscounted} lies outside the no-arbitrage range ({intrinsic}, {cap})"
        )));
    }
    let w = if forward == strike {
        2.0 * norm_inv_cdf(0.5 * (undiscounted / forward + 1.0))
    } else {
        let g = |w: f64| bs_kernel(forward, strike, w, flavor) - undiscounted;
        let mut hi = 1.0;
        while g(hi) < 0.0 {
            hi *= 2.0;
        }
        crate::roots::brent(g, 0.0, hi, 1e-14, 200)?.x
    };
    Ok(w / maturity.sqrt())
}

struct Equivalent {
    ln_vol: f64,
    n_vol: f64,
    rate: RateValue,
    log_moneyness: f64,
}

fn equivalent_vols(strike: f64, market: &MarketParams, grid: &AveragingGrid) -> Result<Equivalent> {
    if !(strike.is_finite() && strike > 0.0) {
        return Err(domain(format!("strike must be positive, got {strike}")));
    }
    let rho = scaled_params(market, grid).rho;
    let s0 = market.spot;
    let a_inf = a_infinity(s0, rho);
    let rate = rate_j(strike / s0, rho, &VariationalConfig::default())?;
    let log_moneyness = (strike / a_inf).ln();
    let (ln_vol, n_vol) = if log_moneyness.abs() < ATM_LOG_THRESHOLD {
        let root_v = fluctuation_variance(rho).sqrt();
        (market.sigma * s0 / a_inf * root_v, market.sigma * s0 * root_v)
    } else {
        let j = rate.value;
        let d = strike - a_inf;
        (
            market.sigma * (0.5 * log_moneyness * log_moneyness / j).sqrt(),
            market.sigma * (0.5 * d * d / j).sqrt(),
        )
    };
    Ok(Equivalent { ln_vol, n_vol, rate, log_moneyness })
}

/// Equivalent log-normal volatility `Sigma_LN(K)` for the average.
pub fn implied_lognormal_vol(strike: f64, market: &MarketParams, grid: &AveragingGrid) -> Result<f64> {
    Ok(equivalent_vols(strike, market, grid)?.ln_vol)
}

/// Equivalent normal volatility `Sigma_N(K)` in price units.
pub fn implied_normal_vol(strike: f64, market: &MarketParams, grid: &AveragingGrid) -> Result<f64> {
    Ok(equivalent_vols(strike, market, grid)?.n_vol)
}

fn classify(log_moneyness: f64, flavor: Flavor) -> Regime {
    if log_moneyness.abs() < ATM_LOG_THRESHOLD {
        return Regime::Atm;
    }
    match (flavor, log_moneyness > 0.0) {
        (Flavor::Call, true) | (Flavor::Put, false) => Regime::Otm,
        _ => Regime::Itm,
    }
}

fn fixed_strike(spec: &OptionSpec) -> Result<f64> {
    spec.strike()
        .ok_or_else(|| domain("expected a fixed-strike option"))
}

/// Fixed-strike price through the equivalent log-normal volatility.
pub fn price_fixed(spec: &OptionSpec, market: &MarketParams, grid: &AveragingGrid) -> Result<PriceResult> {
    let strike = fixed_strike(spec)?;
    let eq = equivalent_vols(strike, market, grid)?;
    let sp = scaled_params(market, grid);
    let t = grid.maturity();
    let a_inf = a_infinity(market.spot, sp.rho);
    let price = (-market.rate * t).exp() * bs_kernel(a_inf, strike, eq.ln_vol * t.sqrt(), spec.flavor);
    let regime = classify(eq.log_moneyness, spec.flavor);
    let decay_rate = (regime == Regime::Otm && sp.beta > 0.0)
        .then(|| grid.n as f64 * eq.rate.value / (2.0 * sp.beta));
    Ok(PriceResult {
        price,
        regime,
        implied_ln_vol: eq.ln_vol,
        implied_n_vol: eq.n_vol,
        decay_rate,
        diagnostics: eq.rate,
    })
}

/// At-the-money leading order `e^{-rT} S0 sqrt(beta v(rho) / pi) / sqrt(n)`,
/// shared by the call and the put.
pub fn atm_price_asymptotic(market: &MarketParams, grid: &AveragingGrid, _flavor: Flavor) -> f64 {
    let sp = scaled_params(market, grid);
    let discount = (-market.rate * grid.maturity()).exp();
    discount * market.spot * (sp.beta * fluctuation_variance(sp.rho) / PI).sqrt() / (grid.n as f64).sqrt()
}

/// In-the-money expansion: discounted intrinsic value on `A_inf` plus the
/// `1/(2n)` discrete-sampling correction.
pub fn itm_expansion(spec: &OptionSpec, market: &MarketParams, grid: &AveragingGrid) -> Result<f64> {
    let strike = fixed_strike(spec)?;
    let rho = scaled_params(market, grid).rho;
    let a_inf = a_infinity(market.spot, rho);
    let lm = (strike / a_inf).ln();
    if classify(lm, spec.flavor) != Regime::Itm {
        return Err(Error::Regime(format!(
            "strike {strike} is not in the money against A_inf = {a_inf}"
        )));
    }
    let discount = (-market.rate * grid.maturity()).exp();
    let correction = market.spot * rho.exp_m1() / (2.0 * grid.n as f64);
    Ok(match spec.flavor {
        Flavor::Call => discount * (a_inf - strike + correction),
        Flavor::Put => discount * (strike - a_inf - correction),
    })
}

/// Leading decay exponent `n I(K)` of an out-of-the-money price.
pub fn otm_decay(spec: &OptionSpec, market: &MarketParams, grid: &AveragingGrid) -> Result<f64> {
    let strike = fixed_strike(spec)?;
    let sp = scaled_params(market, grid);
    if !(sp.beta > 0.0) {
        return Err(domain("decay rate needs sigma > 0"));
    }
    let a_inf = a_infinity(market.spot, sp.rho);
    if classify((strike / a_inf).ln(), spec.flavor) != Regime::Otm {
        return Err(Error::Regime(format!(
            "strike {strike} is not out of the money against A_inf = {a_inf}"
        )));
    }
    let j = rate_j(strike / market.spot, sp.rho, &VariationalConfig::default())?.value;
    Ok(grid.n as f64 * j / (2.0 * sp.beta))
}

/// Floating-strike strike ratio at which the option is at the money,
/// `(1 - e^{-rho}) / rho`.
pub fn floating_atm_kappa(rho: f64) -> f64 {
    growth_factor(-rho)
}

/// Floating-strike price.
///
/// Out of the money the option is a fixed-strike option of the opposite
/// flavor on strike `kappa S0` in the market with `r` and `q` swapped. At the
/// money it uses the `n^{-1/2}` law, in the money the expansion around the
/// intrinsic value.
pub fn price_floating(spec: &OptionSpec, market: &MarketParams, grid: &AveragingGrid) -> Result<PriceResult> {
    let kappa = spec
        .kappa()
        .ok_or_else(|| domain("expected a floating-strike option"))?;
    if !(kappa.is_finite() && kappa > 0.0) {
        return Err(domain(format!("kappa must be positive, got {kappa}")));
    }
    let starred = market.starred();
    let mirrored = OptionSpec::fixed(
        match spec.flavor {
            Flavor::Call => Flavor::Put,
            Flavor::Put => Flavor::Call,
        },
        kappa * market.spot,
    );
    let mut result = price_fixed(&mirrored, &starred, grid)?;
    let sp = scaled_params(market, grid);
    let n = grid.n as f64;
    let t = grid.maturity();
    match result.regime {
        Regime::Otm => {}
        Regime::Atm => {
            let s2 = floating_atm_variance(sp.beta, sp.rho);
            result.price = (-market.rate * t).exp() * market.spot * (s2 / (2.0 * PI)).sqrt() / n.sqrt();
        }
        Regime::Itm => {
            let dr = (-market.rate * t).exp();
            let dq = (-market.dividend * t).exp();
            let a_inf = a_infinity(market.spot, sp.rho);
            let correction = market.spot * sp.rho.exp_m1() / (2.0 * n);
            let forward_gap = kappa * market.spot * dq - dr * (a_inf + correction);
            result.price = match spec.flavor {
                Flavor::Call => forward_gap,
                Flavor::Put => -forward_gap,
            };
        }
    }
    Ok(result)
}

/// Dispatches on the option style.
pub fn price(spec: &OptionSpec, market: &MarketParams, grid: &AveragingGrid) -> Result<PriceResult> {
    match spec.style {
        Style::Fixed { .. } => price_fixed(spec, market, grid),
        Style::Floating { .. } => price_floating(spec, market, grid),
    }
}

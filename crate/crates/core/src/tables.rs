//! Published benchmark scenarios for fixed-strike Asian calls and their
//! reference prices.

use serde::Serialize;

use crate::error::Result;
use crate::pricing::{price_fixed, Flavor, OptionSpec, PriceResult};
use crate::scaling::{AveragingGrid, MarketParams};

/// One benchmark row.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BenchmarkCase {
    pub label: &'static str,
    pub rate: f64,
    pub maturity: f64,
    pub spot: f64,
    pub strike: f64,
    pub sigma: f64,
    pub n: usize,
    /// Large-deviation value (implied-vol route) as published.
    pub reference: f64,
    /// Independent high-accuracy value where one is published.
    pub comparison: Option<f64>,
    /// Log-normal approximation where published.
    pub lognormal: Option<f64>,
}

impl BenchmarkCase {
    pub fn market(&self) -> MarketParams {
        MarketParams {
            spot: self.spot,
            rate: self.rate,
            dividend: 0.0,
            sigma: self.sigma,
        }
    }

    pub fn grid(&self) -> AveragingGrid {
        AveragingGrid {
            n: self.n,
            tau: self.maturity / self.n as f64,
        }
    }

    pub fn spec(&self) -> OptionSpec {
        OptionSpec::fixed(Flavor::Call, self.strike)
    }

    pub fn price(&self) -> Result<PriceResult> {
        price_fixed(&self.spec(), &self.market(), &self.grid())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Table {
    /// Seven continuous-averaging scenarios; comparison is the spectral
    /// expansion.
    Fmw7,
    /// `sigma = 0.01` stress cases; comparison is the third-order expansion.
    SmallVol,
    /// Discretely sampled calls; comparison is the PDE value at `n = 1000`.
    Discrete,
}

impl Table {
    pub fn name(&self) -> &'static str {
        match self {
            Table::Fmw7 => "fmw7",
            Table::SmallVol => "smallvol",
            Table::Discrete => "discrete",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "fmw7" => Some(Table::Fmw7),
            "smallvol" => Some(Table::SmallVol),
            "discrete" => Some(Table::Discrete),
            _ => None,
        }
    }

    pub fn cases(&self) -> Vec<BenchmarkCase> {
        match self {
            Table::Fmw7 => fmw7(),
            Table::SmallVol => small_vol(),
            Table::Discrete => discrete(),
        }
    }
}

#[allow(clippy::too_many_arguments)]
const fn case(
    label: &'static str,
    rate: f64,
    maturity: f64,
    spot: f64,
    strike: f64,
    sigma: f64,
    n: usize,
    reference: f64,
    comparison: Option<f64>,
    lognormal: Option<f64>,
) -> BenchmarkCase {
    BenchmarkCase { label, rate, maturity, spot, strike, sigma, n, reference, comparison, lognormal }
}

pub fn fmw7() -> Vec<BenchmarkCase> {
    vec![
        case("1", 0.02, 1.0, 2.0, 2.0, 0.1, 250, 0.055998, Some(0.055986), Some(0.056054)),
        case("2", 0.18, 1.0, 2.0, 2.0, 0.3, 250, 0.218480, Some(0.218387), Some(0.219829)),
        case("3", 0.0125, 2.0, 2.0, 2.0, 0.25, 250, 0.172460, Some(0.172269), Some(0.173490)),
        case("4", 0.05, 1.0, 1.9, 2.0, 0.5, 250, 0.193692, Some(0.193174), Some(0.195379)),
        case("5", 0.05, 1.0, 2.0, 2.0, 0.5, 250, 0.246944, Some(0.246416), Some(0.249791)),
        case("6", 0.05, 1.0, 2.1, 2.0, 0.5, 250, 0.306744, Some(0.306220), Some(0.310646)),
        case("7", 0.05, 2.0, 2.0, 2.0, 0.5, 250, 0.351517, Some(0.350095), Some(0.359204)),
    ]
}

pub fn small_vol() -> Vec<BenchmarkCase> {
    vec![
        case("T=0.25,K=99", 0.05, 0.25, 100.0, 99.0, 0.01, 250, 1.60739, Some(1.60739), None),
        case("T=0.25,K=100", 0.05, 0.25, 100.0, 100.0, 0.01, 250, 0.621359, Some(0.621359), None),
        case("T=0.25,K=101", 0.05, 0.25, 100.0, 101.0, 0.01, 250, 0.0137615, Some(0.0137618), None),
        case("T=1,K=97", 0.05, 1.0, 100.0, 97.0, 0.01, 250, 5.2719, Some(5.27190), None),
        case("T=1,K=100", 0.05, 1.0, 100.0, 100.0, 0.01, 250, 2.41821, Some(2.41821), None),
        case("T=1,K=103", 0.05, 1.0, 100.0, 103.0, 0.01, 250, 0.0724339, Some(0.0726910), None),
        case("T=5,K=80", 0.05, 5.0, 100.0, 80.0, 0.01, 250, 26.1756, Some(26.1756), None),
        case("T=5,K=100", 0.05, 5.0, 100.0, 100.0, 0.01, 250, 10.5996, Some(10.5996), None),
        case("T=5,K=120", 0.05, 5.0, 100.0, 120.0, 0.01, 250, 5.8331e-6, Some(2.06699e-5), None),
    ]
}

pub fn discrete() -> Vec<BenchmarkCase> {
    vec![
        case("S0=95", 0.1, 1.0, 95.0, 100.0, 0.4, 1000, 8.3789, Some(8.3741), None),
        case("S0=100", 0.1, 1.0, 100.0, 100.0, 0.4, 1000, 11.1362, Some(11.1322), None),
        case("S0=105", 0.1, 1.0, 105.0, 100.0, 0.4, 1000, 14.2818, Some(14.2786), None),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for t in [Table::Fmw7, Table::SmallVol, Table::Discrete] {
            assert_eq!(Table::parse(t.name()), Some(t));
        }
        assert_eq!(Table::parse("nope"), None);
    }

    #[test]
    fn grids_match_maturities() {
        for t in [Table::Fmw7, Table::SmallVol, Table::Discrete] {
            for c in t.cases() {
                assert!((c.grid().maturity() - c.maturity).abs() < 1e-12);
            }
        }
    }
}

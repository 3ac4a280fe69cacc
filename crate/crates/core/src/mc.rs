//! Exact-in-distribution Monte Carlo for the discrete average.
//!
//! Each sample unit draws from its own ChaCha stream keyed by `(seed, unit)`,
//! so the estimate does not depend on batching or thread count.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::pricing::OptionSpec;
use crate::scaling::{a_infinity, scaled_params, AveragingGrid, MarketParams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    pub paths: usize,
    pub seed: u64,
    /// Pair every path with its mirror; the pair average is the sample unit.
    pub antithetic: bool,
    /// Sample units per parallel work item.
    pub batch: usize,
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            paths: 100_000,
            seed: 20_160_518,
            antithetic: true,
            batch: 8192,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub mean: f64,
    /// Standard deviation of the sample units over the square root of their count.
    pub stderr: f64,
    pub paths: usize,
    pub elapsed: f64,
}

/// Moments of the simulated average.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AverageMoments {
    /// `E[A_n]`.
    pub mean: McEstimate,
    /// `Var(sqrt(n) (A_n - A_inf) / S0)`, centred on the known limit.
    pub scaled_variance: McEstimate,
    /// `E[S_T]`, for the martingale check.
    pub terminal: McEstimate,
}

/// Running mean and centred sum of squares (Welford), merged with Chan's rule.
#[derive(Debug, Clone, Copy, Default)]
struct Accumulator {
    count: f64,
    mean: f64,
    m2: f64,
}

impl Accumulator {
    fn push(&mut self, x: f64) {
        self.count += 1.0;
        let d = x - self.mean;
        self.mean += d / self.count;
        self.m2 += d * (x - self.mean);
    }

    fn merge(self, other: Self) -> Self {
        if self.count == 0.0 {
            return other;
        }
        if other.count == 0.0 {
            return self;
        }
        let count = self.count + other.count;
        let d = other.mean - self.mean;
        Self {
            count,
            mean: self.mean + d * other.count / count,
            m2: self.m2 + other.m2 + d * d * self.count * other.count / count,
        }
    }

    fn estimate(&self, paths: usize, elapsed: f64) -> McEstimate {
        let stderr = if self.count > 1.0 {
            (self.m2 / (self.count - 1.0) / self.count).sqrt()
        } else {
            0.0
        };
        McEstimate { mean: self.mean, stderr, paths, elapsed }
    }
}

/// One simulated path: arithmetic average over `t_1..t_n` and `S_T`.
#[derive(Debug, Clone, Copy)]
struct PathSummary {
    average: f64,
    terminal: f64,
}

struct PathSampler {
    n: usize,
    log_spot: f64,
    drift: f64,
    diffusion: f64,
}

impl PathSampler {
    fn new(market: &MarketParams, grid: &AveragingGrid) -> Self {
        let s = market.sigma;
        Self {
            n: grid.n,
            log_spot: market.spot.ln(),
            drift: (market.rate - market.dividend - 0.5 * s * s) * grid.tau,
            diffusion: s * grid.tau.sqrt(),
        }
    }

    /// Draws one path, plus its mirror when `antithetic`.
    fn sample(&self, rng: &mut ChaCha8Rng, antithetic: bool, out: &mut Vec<PathSummary>) {
        out.clear();
        let mut x = self.log_spot;
        let mut y = self.log_spot;
        let (mut sx, mut sy) = (0.0, 0.0);
        for _ in 0..self.n {
            let z: f64 = StandardNormal.sample(rng);
            x += self.drift + self.diffusion * z;
            sx += x.exp();
            if antithetic {
                y += self.drift - self.diffusion * z;
                sy += y.exp();
            }
        }
        let n = self.n as f64;
        out.push(PathSummary { average: sx / n, terminal: x.exp() });
        if antithetic {
            out.push(PathSummary { average: sy / n, terminal: y.exp() });
        }
    }
}

/// Runs the simulation and folds each sample unit through `stats`, which maps
/// the unit's paths to `K` statistics.
fn simulate<const K: usize>(
    market: &MarketParams,
    grid: &AveragingGrid,
    cfg: &McConfig,
    stats: impl Fn(&PathSummary) -> [f64; K] + Sync,
) -> Result<([Accumulator; K], usize, f64)> {
    if cfg.paths == 0 {
        return Err(domain("at least one path is required"));
    }
    let start = Instant::now();
    let per_unit = if cfg.antithetic { 2 } else { 1 };
    let units = cfg.paths.div_ceil(per_unit);
    let batch = cfg.batch.max(1);
    let sampler = PathSampler::new(market, grid);
    let base = ChaCha8Rng::seed_from_u64(cfg.seed);
    let batches: Vec<[Accumulator; K]> = (0..units.div_ceil(batch))
        .into_par_iter()
        .map(|b| {
            let mut acc = [Accumulator::default(); K];
            let mut paths = Vec::with_capacity(2);
            for unit in b * batch..((b + 1) * batch).min(units) {
                let mut rng = base.clone();
                rng.set_stream(unit as u64);
                sampler.sample(&mut rng, cfg.antithetic, &mut paths);
                let mut vals = [0.0; K];
                for p in &paths {
                    for (v, s) in vals.iter_mut().zip(stats(p)) {
                        *v += s;
                    }
                }
                for (a, v) in acc.iter_mut().zip(vals) {
                    a.push(v / paths.len() as f64);
                }
            }
            acc
        })
        .collect();
    let mut total = [Accumulator::default(); K];
    for part in batches {
        for (t, p) in total.iter_mut().zip(part) {
            *t = t.merge(p);
        }
    }
    Ok((total, units * per_unit, start.elapsed().as_secs_f64()))
}

/// Discounted Monte Carlo price of a fixed- or floating-strike option.
pub fn mc_price(spec: &OptionSpec, market: &MarketParams, grid: &AveragingGrid, cfg: &McConfig) -> Result<McEstimate> {
    let discount = (-market.rate * grid.maturity()).exp();
    let ([acc], paths, elapsed) =
        simulate(market, grid, cfg, |p| [discount * spec.payoff(p.average, p.terminal)])?;
    Ok(acc.estimate(paths, elapsed))
}

/// Sample moments of `A_n` and of the scaled fluctuation around `A_inf`.
pub fn mc_average_moments(market: &MarketParams, grid: &AveragingGrid, cfg: &McConfig) -> Result<AverageMoments> {
    let s0 = market.spot;
    let a_inf = a_infinity(s0, scaled_params(market, grid).rho);
    let root_n = (grid.n as f64).sqrt();
    let ([mean, var, term], paths, elapsed) = simulate(market, grid, cfg, |p| {
        let y = root_n * (p.average - a_inf) / s0;
        [p.average, y * y, p.terminal]
    })?;
    Ok(AverageMoments {
        mean: mean.estimate(paths, elapsed),
        scaled_variance: var.estimate(paths, elapsed),
        terminal: term.estimate(paths, elapsed),
    })
}

//! Closed-form solutions of the path-space variational problems behind the
//! large-deviation rate function and the limiting log-MGF of the average.
//!
//! The Euler-Lagrange equation `f'' = a e^f` with `f(0) = 0`, `f'(1) = rho`
//! has a hyperbolic family (root `delta`) and a trigonometric family (root
//! `xi`). Both are slices of one analytic family in `w = z^2`, with `z = 2 xi`
//! on the trigonometric side and `z = i delta` on the hyperbolic side, so
//! `w > 0` is trigonometric, `w < 0` hyperbolic and `w = 0` is the boundary
//! `x / S0 = 1 + rho / 2` where the two branches meet.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{convergence, domain, Result};
use crate::roots::{bisect, brent};
use crate::scaling::{fluctuation_variance, growth_factor};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    Hyperbolic,
    Trigonometric,
    /// Root within the series threshold of the branch boundary.
    SeriesBoundary,
}

impl std::fmt::Display for Branch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Branch::Hyperbolic => "hyperbolic",
            Branch::Trigonometric => "trigonometric",
            Branch::SeriesBoundary => "series",
        })
    }
}

/// Outcome of a rate-function or MGF-limit evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateValue {
    pub value: f64,
    pub branch: Branch,
    /// `delta` on the hyperbolic side, `xi` on the trigonometric side.
    pub root: f64,
    /// Relative residual of the branch equation at `root`.
    pub residual: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VariationalConfig {
    pub root_tol: f64,
    pub series_threshold: f64,
    pub max_iter: usize,
}

impl Default for VariationalConfig {
    fn default() -> Self {
        Self {
            root_tol: 1e-13,
            series_threshold: 1e-4,
            max_iter: 200,
        }
    }
}

impl VariationalConfig {
    fn validate(&self) -> Result<()> {
        if !(self.root_tol > 0.0 && self.series_threshold > 0.0) {
            return Err(domain("root_tol and series_threshold must be positive"));
        }
        Ok(())
    }
}

/// A solved branch equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchRoot {
    pub root: f64,
    pub residual: f64,
    pub iterations: usize,
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// `sinh(x) / x`.
fn shc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 + x * x / 6.0
    } else {
        x.sinh() / x
    }
}

/// `int_0^1 e^{f_1}` on the hyperbolic branch:
/// `sinh(delta)/delta + (2 rho / delta^2) sinh^2(delta/2)`.
pub fn t_hyperbolic(delta: f64, rho: f64) -> f64 {
    1.0 + 0.5 * rho + boundary_gap(-delta * delta, rho)
}

/// `int_0^1 e^{f_2}` on the trigonometric branch:
/// `sin(2 xi)/(2 xi) * (1 + (rho/2) tan(xi)/xi)`.
pub fn t_trigonometric(xi: f64, rho: f64) -> f64 {
    1.0 + 0.5 * rho + boundary_gap(4.0 * xi * xi, rho)
}

/// `T(w) - (1 + rho/2)` without cancellation near `w = 0`.
///
/// Power series `sum_{k>=1} (-1)^k (rho + 2k + 2) w^k / (2k + 2)!` for
/// `|w| <= 1`, closed form outside.
pub fn boundary_gap(w: f64, rho: f64) -> f64 {
    if w.abs() <= 1.0 {
        let mut sum = 0.0;
        let mut term = 1.0;
        // term = w^k / (2k + 2)!
        let mut fact = 2.0;
        for k in 1..=14 {
            let kk = k as f64;
            fact *= (2.0 * kk + 1.0) * (2.0 * kk + 2.0);
            term *= w;
            let sign = if k % 2 == 1 { -1.0 } else { 1.0 };
            sum += sign * (rho + 2.0 * kk + 2.0) * term / fact;
        }
        sum
    } else if w > 0.0 {
        let z = w.sqrt();
        let half = 0.5 * z;
        let s = half.sin() / half;
        z.sin() / z + 0.5 * rho * s * s - (1.0 + 0.5 * rho)
    } else {
        let d = (-w).sqrt();
        let half = 0.5 * d;
        let s = half.sinh() / half;
        d.sinh() / d + 0.5 * rho * s * s - (1.0 + 0.5 * rho)
    }
}

/// `h(xi) = 2 xi cos(xi) + rho sin(xi)`; its first positive zero closes the
/// trigonometric bracket.
fn h_trig(xi: f64, rho: f64) -> f64 {
    2.0 * xi * xi.cos() + rho * xi.sin()
}

/// Smallest positive solution of `tan(xi) = -2 xi / rho` (`pi/2` at `rho = 0`).
/// `None` for `rho <= -2`, where the trigonometric branch has no positive
/// target values.
pub fn xi_max(rho: f64) -> Option<f64> {
    if rho == 0.0 {
        Some(FRAC_PI_2)
    } else if rho > 0.0 {
        Some(bisect(|x| h_trig(x, rho), FRAC_PI_2, PI, 200))
    } else if rho > -2.0 {
        // h ~ (2 + rho) xi > 0 near zero and h(pi/2) = rho < 0.
        Some(bisect(|x| h_trig(x, rho), 0.0, FRAC_PI_2, 200))
    } else {
        None
    }
}

/// Root `delta >= 0` of `t_hyperbolic(delta, rho) = x_ratio`.
/// Requires `x_ratio >= 1 + rho/2`.
pub fn solve_delta_fixed(x_ratio: f64, rho: f64, cfg: &VariationalConfig) -> Result<BranchRoot> {
    cfg.validate()?;
    let gap = x_ratio - (1.0 + 0.5 * rho);
    if !(gap >= 0.0) {
        return Err(domain(format!(
            "hyperbolic branch needs x/S0 >= 1 + rho/2, got x/S0 = {x_ratio}, rho = {rho}"
        )));
    }
    if gap == 0.0 {
        return Ok(BranchRoot { root: 0.0, residual: 0.0, iterations: 0 });
    }
    let g = |d: f64| boundary_gap(-d * d, rho) - gap;
    let mut hi = 1.0;
    let mut expansions = 0;
    while g(hi) <= 0.0 {
        hi *= 2.0;
        expansions += 1;
        if expansions > 64 || !hi.is_finite() {
            return Err(convergence("could not bracket the hyperbolic root"));
        }
    }
    let r = brent(g, 0.0, hi, cfg.root_tol, cfg.max_iter)?;
    Ok(BranchRoot {
        root: r.x,
        residual: r.fx.abs() / x_ratio.max(1.0),
        iterations: r.iterations + expansions,
    })
}

/// Root `xi` in `(0, xi_max)` of `t_trigonometric(xi, rho) = x_ratio`.
/// Requires `0 < x_ratio <= 1 + rho/2`.
pub fn solve_xi_fixed(x_ratio: f64, rho: f64, cfg: &VariationalConfig) -> Result<BranchRoot> {
    cfg.validate()?;
    let gap = x_ratio - (1.0 + 0.5 * rho);
    if !(x_ratio > 0.0 && gap <= 0.0) {
        return Err(domain(format!(
            "trigonometric branch needs 0 < x/S0 <= 1 + rho/2, got x/S0 = {x_ratio}, rho = {rho}"
        )));
    }
    if gap == 0.0 {
        return Ok(BranchRoot { root: 0.0, residual: 0.0, iterations: 0 });
    }
    let upper = xi_max(rho).ok_or_else(|| domain("no trigonometric branch for rho <= -2"))?;
    let g = |xi: f64| boundary_gap(4.0 * xi * xi, rho) - gap;
    // The bracket must hold a single crossing.
    let probes = 64;
    let mut crossings = 0;
    let mut prev = g(0.0);
    for i in 1..=probes {
        let cur = g(upper * i as f64 / probes as f64);
        if cur.signum() != prev.signum() {
            crossings += 1;
        }
        prev = cur;
    }
    if crossings > 1 {
        return Err(convergence(format!(
            "trigonometric equation has {crossings} sign changes on (0, xi_max)"
        )));
    }
    let r = brent(g, 0.0, upper, cfg.root_tol, cfg.max_iter)?;
    Ok(BranchRoot {
        root: r.x,
        residual: r.fx.abs() / x_ratio.max(1.0),
        iterations: r.iterations,
    })
}

/// Hyperbolic-branch rate `J_1(delta)`.
fn j_hyperbolic(delta: f64, rho: f64) -> f64 {
    let th = (0.5 * delta).tanh();
    let shape = 1.0 - 2.0 * th / (delta + rho * th);
    // log(cosh(d/2) + (rho/d) sinh(d/2)) written to survive large d
    let em = (-delta).exp();
    let log_term = 0.5 * delta + (0.5 * (1.0 + em) + 0.5 * rho * (-(-delta).exp_m1()) / delta).ln();
    0.5 * (delta * delta - rho * rho) * shape - 2.0 * rho * log_term + rho * rho
}

/// Trigonometric-branch rate `J_2(xi)`.
fn j_trigonometric(xi: f64, rho: f64) -> f64 {
    let h = h_trig(xi, rho);
    let shape = 2.0 * xi.sin() / h - 1.0;
    2.0 * (xi * xi + 0.25 * rho * rho) * shape - 2.0 * rho * (h / (2.0 * xi)).ln() + rho * rho
}

/// Unified rate `J(w)` expanded to third order in `w = z^2` around the
/// branch boundary.
fn j_series(w: f64, rho: f64) -> f64 {
    let p = rho + 2.0;
    let j0 = rho * rho * (rho + 4.0) / (2.0 * p) - 2.0 * rho * (0.5 * rho).ln_1p();
    let c1 = rho * rho * (rho + 4.0) / (12.0 * p * p);
    let c2 = (((rho + 18.0) * rho + 132.0) * rho * rho + 360.0 * rho + 480.0) / (1440.0 * p.powi(3));
    let c3 = ((((rho + 26.0) * rho + 288.0) * rho + 1656.0) * rho * rho + 4536.0 * rho + 6048.0)
        / (90720.0 * p.powi(4));
    j0 + w * (c1 + w * (c2 + w * c3))
}

/// Value of the rate at the branch boundary `x/S0 = 1 + rho/2`.
pub fn boundary_rate(rho: f64) -> f64 {
    j_series(0.0, rho)
}

/// Within this distance of the average limit `(e^rho - 1)/rho` the rate is
/// taken from its quartic Taylor polynomial, because the closed forms lose
/// `eps / J` relative accuracy as `J -> 0`.
pub const NEAR_LIMIT: f64 = 1e-4;

/// Offset of the stencil that fixes the cubic and quartic Taylor terms.
const TAYLOR_STEP: f64 = 1e-2;

/// Normalised rate `J(x/S0, rho)`; the rate of the average is `J / (2 beta)`.
pub fn rate_j(x_ratio: f64, rho: f64, cfg: &VariationalConfig) -> Result<RateValue> {
    if !(x_ratio.is_finite() && x_ratio > 0.0) {
        return Err(domain(format!("rate is infinite for x/S0 = {x_ratio}")));
    }
    if !rho.is_finite() {
        return Err(domain("rho must be finite"));
    }
    let limit = growth_factor(rho);
    let d = x_ratio - limit;
    let mut out = rate_j_closed(x_ratio, rho, cfg)?;
    if d.abs() < NEAR_LIMIT {
        // J = d^2 (q0 + q1 d + q2 d^2), q0 = 1 / (2 v)
        let h = TAYLOR_STEP;
        let q0 = 0.5 / fluctuation_variance(rho);
        let up = rate_j_closed(limit + h, rho, cfg)?.value / (h * h);
        let down = rate_j_closed(limit - h, rho, cfg)?.value / (h * h);
        let q1 = (up - down) / (2.0 * h);
        let q2 = (0.5 * (up + down) - q0) / (h * h);
        out.value = d * d * (q0 + d * (q1 + d * q2));
    }
    Ok(out)
}

fn rate_j_closed(x_ratio: f64, rho: f64, cfg: &VariationalConfig) -> Result<RateValue> {
    if x_ratio >= 1.0 + 0.5 * rho {
        let r = solve_delta_fixed(x_ratio, rho, cfg)?;
        let (value, branch) = if r.root < cfg.series_threshold {
            (j_series(-r.root * r.root, rho), Branch::SeriesBoundary)
        } else {
            (j_hyperbolic(r.root, rho), Branch::Hyperbolic)
        };
        Ok(RateValue {
            value,
            branch,
            root: r.root,
            residual: r.residual,
            iterations: r.iterations,
        })
    } else {
        let r = solve_xi_fixed(x_ratio, rho, cfg)?;
        let (value, branch) = if r.root < cfg.series_threshold {
            (j_series(4.0 * r.root * r.root, rho), Branch::SeriesBoundary)
        } else {
            (j_trigonometric(r.root, rho), Branch::Trigonometric)
        };
        Ok(RateValue {
            value,
            branch,
            root: r.root,
            residual: r.residual,
            iterations: r.iterations,
        })
    }
}

/// Rate function `I(x) = J(x/S0, rho) / (2 beta)` of the discrete average.
/// `+inf` for `x <= 0`.
pub fn rate_i(x: f64, spot: f64, beta: f64, rho: f64) -> Result<f64> {
    if !(beta > 0.0) {
        return Err(domain(format!("rate function needs beta > 0, got {beta}")));
    }
    if !(spot > 0.0) {
        return Err(domain("spot must be positive"));
    }
    if x <= 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(rate_j(x / spot, rho, &VariationalConfig::default())?.value / (2.0 * beta))
}

/// `lambda(a, b; rho) = sup_g { -a int e^{b g} - 1/2 int (g' - rho/b)^2 }` for
/// `a, b > 0`.
pub fn lambda_mgf(a: f64, b: f64, rho: f64) -> Result<RateValue> {
    lambda_mgf_with(a, b, rho, &VariationalConfig::default())
}

pub fn lambda_mgf_with(a: f64, b: f64, rho: f64, cfg: &VariationalConfig) -> Result<RateValue> {
    cfg.validate()?;
    if !(a > 0.0 && a.is_finite()) || !(b > 0.0 && b.is_finite()) {
        return Err(domain(format!("lambda needs a > 0 and b > 0, got a = {a}, b = {b}")));
    }
    let k = a * b * b;
    let b2 = b * b;
    let p = 2.0 + rho;
    let split = 2.0 * rho * rho / (p * p);
    if k > split {
        let upper = xi_max(rho)
            .ok_or_else(|| domain("trigonometric MGF branch is not supported for rho <= -2"))?;
        let g = |xi: f64| {
            let q = 2.0 * xi.cos() + rho * sinc(xi);
            k * q * q - 2.0 * (4.0 * xi * xi + rho * rho)
        };
        let r = brent(g, 0.0, upper, cfg.root_tol, cfg.max_iter)?;
        let xi = r.x;
        let s = xi.sin();
        let value = a
            * (1.0 - s * s * (1.0 + rho / (xi * xi) - rho * rho / (4.0 * xi * xi))
                + (rho - 2.0) / (2.0 * xi) * (2.0 * xi).sin())
            + 2.0 * rho / b2 * (h_trig(xi, rho) / (2.0 * xi)).ln()
            - rho * rho / b2;
        let scale = (2.0 * xi * xi * (4.0 * xi * xi + rho * rho)).max(1.0);
        Ok(RateValue {
            value,
            branch: Branch::Trigonometric,
            root: xi,
            residual: (r.fx * xi * xi).abs() / scale,
            iterations: r.iterations,
        })
    } else if k < split {
        let g = |d: f64| {
            let q = (0.5 * d).cosh() + 0.5 * rho * shc(0.5 * d);
            rho * rho - d * d - 2.0 * k * q * q
        };
        let r = brent(g, 0.0, rho.abs(), cfg.root_tol, cfg.max_iter)?;
        let d = r.x;
        let sh = (0.5 * d).sinh();
        let value = a
            * (1.0 + sh * sh * (1.0 - 4.0 * rho / (d * d) + rho * rho / (d * d))
                - (2.0 - rho) * shc(d))
            + 2.0 * rho / b2 * ((0.5 * d).cosh() + 0.5 * rho * shc(0.5 * d)).ln()
            - rho * rho / b2;
        Ok(RateValue {
            value,
            branch: Branch::Hyperbolic,
            root: d,
            residual: r.fx.abs() / (rho * rho).max(1.0),
            iterations: r.iterations,
        })
    } else {
        Ok(RateValue {
            value: a * (0.25 * rho * rho - 1.0) + 2.0 * rho / b2 * (0.5 * rho).ln_1p() - rho * rho / b2,
            branch: Branch::SeriesBoundary,
            root: 0.0,
            residual: 0.0,
            iterations: 0,
        })
    }
}

/// `lim (1/n) log E[exp(theta n A_n)]`: `+inf` for `theta > 0`.
pub fn mgf_log_limit(theta: f64, spot: f64, beta: f64, rho: f64) -> Result<f64> {
    if theta.is_nan() {
        return Err(domain("theta is NaN"));
    }
    if theta > 0.0 {
        return Ok(f64::INFINITY);
    }
    if theta == 0.0 {
        return Ok(0.0);
    }
    if beta == 0.0 {
        // deterministic average
        return Ok(theta * crate::scaling::a_infinity(spot, rho));
    }
    if !(beta > 0.0) {
        return Err(domain(format!("beta must be non-negative, got {beta}")));
    }
    Ok(lambda_mgf(-theta * spot, (2.0 * beta).sqrt(), rho)?.value)
}

/// Floating-strike rate `H(0; rho) = I(kappa S0; -rho)`.
pub fn floating_rate_h0(kappa: f64, beta: f64, rho: f64) -> Result<f64> {
    if !(kappa > 0.0) {
        return Err(domain(format!("kappa must be positive, got {kappa}")));
    }
    if !(beta > 0.0) {
        return Err(domain(format!("rate function needs beta > 0, got {beta}")));
    }
    Ok(rate_j(kappa, -rho, &VariationalConfig::default())?.value / (2.0 * beta))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> VariationalConfig {
        VariationalConfig::default()
    }

    // Independent references computed with 50-digit arithmetic.
    const DELTA_X2: f64 = 2.177_318_984_965_306_8;
    const J_X2: f64 = 0.636_367_494_525_240_4;
    const XI_HALF: f64 = 0.947_747_133_516_990_5;
    const J_HALF: f64 = 0.841_595_790_105_893_4;
    const XI_LAMBDA_111: f64 = 0.588_250_969_950_916_2;
    const LAMBDA_110: f64 = -0.877_435_129_322_172_8;

    #[test]
    fn delta_roots() {
        assert_eq!(solve_delta_fixed(1.0, 0.0, &cfg()).unwrap().root, 0.0);
        let r = solve_delta_fixed(2.0, 0.0, &cfg()).unwrap();
        assert!((r.root - DELTA_X2).abs() < 1e-13);
        assert!((t_hyperbolic(r.root, 0.0) - 2.0).abs() < 1e-14);
        // the average limit sits at |delta| = |rho|
        let r = solve_delta_fixed(growth_factor(0.1), 0.1, &cfg()).unwrap();
        assert!((r.root - 0.1).abs() < 1e-12);
        assert!(matches!(solve_delta_fixed(0.9, 0.0, &cfg()), Err(crate::Error::Domain(_))));
    }

    #[test]
    fn xi_roots() {
        assert_eq!(solve_xi_fixed(1.0, 0.0, &cfg()).unwrap().root, 0.0);
        let r = solve_xi_fixed(0.5, 0.0, &cfg()).unwrap();
        assert!((r.root - XI_HALF).abs() < 1e-13);
        let r = solve_xi_fixed(1e-12, 0.0, &cfg()).unwrap();
        assert!(FRAC_PI_2 - r.root < 1e-5 && r.root < FRAC_PI_2);
        assert!(solve_xi_fixed(1.2, 0.0, &cfg()).is_err());
        assert!(solve_xi_fixed(0.0, 0.0, &cfg()).is_err());
    }

    #[test]
    fn xi_max_solves_its_equation() {
        assert_eq!(xi_max(0.0), Some(FRAC_PI_2));
        for &rho in &[-1.9, -1.0, -0.1, 0.1, 1.0, 5.0] {
            let x = xi_max(rho).unwrap();
            assert!(h_trig(x, rho).abs() < 1e-12, "rho={rho}");
            assert!(t_trigonometric(x, rho).abs() < 1e-12);
        }
        assert_eq!(xi_max(-2.5), None);
    }

    #[test]
    fn rho_zero_rate_values() {
        let v = rate_j(0.5, 0.0, &cfg()).unwrap();
        assert_eq!(v.branch, Branch::Trigonometric);
        assert!((v.value - J_HALF).abs() < 1e-12);
        let v = rate_j(2.0, 0.0, &cfg()).unwrap();
        assert_eq!(v.branch, Branch::Hyperbolic);
        assert!((v.value - J_X2).abs() < 1e-12);
        assert_eq!(rate_j(1.0, 0.0, &cfg()).unwrap().value, 0.0);
    }

    #[test]
    fn rate_vanishes_at_the_average_limit() {
        for &rho in &[-1.0, -0.1, 0.0, 0.1, 1.0] {
            let v = rate_j(growth_factor(rho), rho, &cfg()).unwrap();
            assert!(v.value.abs() < 1e-12, "rho={rho}: {}", v.value);
        }
    }

    #[test]
    fn rate_domain() {
        assert!(rate_j(0.0, 0.0, &cfg()).is_err());
        assert!(rate_j(-1.0, 0.3, &cfg()).is_err());
        assert_eq!(rate_i(-1.0, 1.0, 1.0, 0.0).unwrap(), f64::INFINITY);
        assert!(rate_i(1.0, 1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn rate_i_scales_by_beta() {
        assert!((rate_i(0.5, 1.0, 1.0, 0.0).unwrap() - J_HALF / 2.0).abs() < 1e-12);
        assert!(rate_i(crate::scaling::a_infinity(3.0, 0.2), 3.0, 0.7, 0.2).unwrap().abs() < 1e-12);
    }

    #[test]
    fn evenness_of_hyperbolic_branch() {
        for &rho in &[-0.5, 0.0, 0.3] {
            for &d in &[0.01, 0.7, 3.0] {
                assert_eq!(t_hyperbolic(d, rho), t_hyperbolic(-d, rho));
                assert!((j_hyperbolic(d, rho) - j_hyperbolic(-d, rho)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn series_and_closed_forms_agree() {
        for &rho in &[-0.9, -0.2, 0.0, 0.2, 1.0] {
            for &d in &[1e-3, 1e-2] {
                let a = j_series(-d * d, rho);
                let b = j_hyperbolic(d, rho);
                assert!((a - b).abs() < 1e-13, "rho={rho} d={d}: {a} {b}");
            }
            for &x in &[1e-3, 1e-2] {
                let a = j_series(4.0 * x * x, rho);
                let b = j_trigonometric(x, rho);
                assert!((a - b).abs() < 1e-13, "rho={rho} xi={x}: {a} {b}");
            }
        }
    }

    #[test]
    fn gap_series_matches_closed_form() {
        for &rho in &[-1.5f64, 0.0, 0.7] {
            for &w in &[-1.0f64, -0.5, 0.3, 1.0] {
                let z = w.abs().sqrt();
                let closed = if w > 0.0 {
                    (z.sin() / z) * (1.0 + rho * (0.5 * z).tan() / z) - (1.0 + 0.5 * rho)
                } else {
                    z.sinh() / z + 2.0 * rho / (z * z) * (0.5 * z).sinh().powi(2) - (1.0 + 0.5 * rho)
                };
                assert!((boundary_gap(w, rho) - closed).abs() < 1e-14, "rho={rho} w={w}");
            }
        }
    }

    #[test]
    fn branch_continuity_at_boundary() {
        for &rho in &[-1.0, -0.3, 0.0, 0.4, 1.0] {
            let edge = 1.0 + 0.5 * rho;
            let limit = boundary_rate(rho);
            let closed = -rho.powi(3) / (4.0 * edge) - 2.0 * rho * edge.ln() + rho * rho;
            assert!((limit - closed).abs() < 1e-14);
            for &eps in &[1e-6, 1e-9, 1e-12] {
                let up = rate_j(edge + eps, rho, &cfg()).unwrap().value;
                let down = rate_j(edge - eps, rho, &cfg()).unwrap().value;
                // J is smooth across the boundary, so both sides sit within O(eps)
                assert!((up - limit).abs() < 4.0 * eps, "rho={rho} eps={eps}: {up} {limit}");
                assert!((down - limit).abs() < 4.0 * eps, "rho={rho} eps={eps}: {down} {limit}");
                let slope = (up - down) / (2.0 * eps);
                if eps == 1e-6 {
                    let wide = (rate_j(edge + 1e-4, rho, &cfg()).unwrap().value
                        - rate_j(edge - 1e-4, rho, &cfg()).unwrap().value)
                        / 2e-4;
                    assert!((slope - wide).abs() < 1e-5, "rho={rho}: {slope} {wide}");
                }
            }
            assert_eq!(rate_j(edge, rho, &cfg()).unwrap().branch, Branch::SeriesBoundary);
        }
    }

    #[test]
    fn lambda_rho_zero() {
        let v = lambda_mgf(1.0, 1.0, 0.0).unwrap();
        assert_eq!(v.branch, Branch::Trigonometric);
        assert!((v.root - XI_LAMBDA_111).abs() < 1e-12);
        assert!((v.value - LAMBDA_110).abs() < 1e-12);
    }

    #[test]
    fn lambda_small_a_tends_to_zero() {
        for &rho in &[-0.5, 0.0, 0.5] {
            let v = lambda_mgf(1e-10, 1.0, rho).unwrap();
            assert!(v.value.abs() < 1e-8, "rho={rho}: {}", v.value);
        }
    }

    #[test]
    fn lambda_branches_are_exclusive() {
        for &rho in &[-1.5, -0.5, -0.05, 0.05, 0.5, 1.5] {
            for &a in &[1e-3, 1e-2, 0.1, 1.0, 10.0] {
                for &b in &[0.3, 1.0, 2.0] {
                    let k: f64 = a * b * b;
                    let up = xi_max(rho).unwrap();
                    let g2 = |xi: f64| {
                        let q = 2.0 * xi.cos() + rho * sinc(xi);
                        k * q * q - 2.0 * (4.0 * xi * xi + rho * rho)
                    };
                    let g1 = |d: f64| {
                        let q = (0.5 * d).cosh() + 0.5 * rho * shc(0.5 * d);
                        rho * rho - d * d - 2.0 * k * q * q
                    };
                    let eps = 1e-9;
                    let trig = g2(eps) > 0.0 && g2(up - eps) < 0.0;
                    let hyp = g1(eps) > 0.0 && g1(rho.abs() - eps) < 0.0;
                    assert!(trig ^ hyp, "rho={rho} a={a} b={b}");
                    let v = lambda_mgf(a, b, rho).unwrap();
                    assert_eq!(v.branch == Branch::Trigonometric, trig);
                    assert!(v.residual < 1e-12);
                }
            }
        }
    }

    #[test]
    fn lambda_reduces_to_rho_zero_form() {
        for &(a, b) in &[(0.5, 1.0), (1.0, 1.0), (2.0, 0.7)] {
            let zero = lambda_mgf(a, b, 0.0).unwrap().value;
            let near = lambda_mgf(a, b, 1e-8).unwrap().value;
            assert!((zero - near).abs() < 1e-6);
            let xi = lambda_mgf(a, b, 0.0).unwrap().root;
            assert!((2.0 * xi * xi - a * b * b * xi.cos().powi(2)).abs() < 1e-13);
            assert!((zero - a * (xi.cos().powi(2) - (2.0 * xi).sin() / xi)).abs() < 1e-13);
        }
    }

    #[test]
    fn mgf_limit_cases() {
        assert_eq!(mgf_log_limit(0.1, 1.0, 0.5, 0.0).unwrap(), f64::INFINITY);
        assert_eq!(mgf_log_limit(0.0, 1.0, 0.5, 0.0).unwrap(), 0.0);
        let v = mgf_log_limit(-1.0, 1.0, 0.5, 0.0).unwrap();
        assert!((v - LAMBDA_110).abs() < 1e-12);
    }

    #[test]
    fn floating_rate_cases() {
        let atm = -(-0.05f64).exp_m1() / 0.05;
        assert!(floating_rate_h0(atm, 1.0, 0.05).unwrap().abs() < 1e-12);
        assert_eq!(floating_rate_h0(1.0, 1.0, 0.0).unwrap(), 0.0);
        let direct = rate_j(0.8, -0.05, &cfg()).unwrap().value / 2.0;
        assert_eq!(floating_rate_h0(0.8, 1.0, 0.05).unwrap(), direct);
    }

    #[test]
    fn near_limit_taylor_meets_closed_form() {
        for &rho in &[-1.0, -0.2, 0.02, 0.3, 1.5] {
            let g = growth_factor(rho);
            for side in [-1.0, 1.0] {
                let x = g + side * NEAR_LIMIT * (1.0 - 1e-12);
                let taylor = rate_j(x, rho, &cfg()).unwrap().value;
                let closed = rate_j_closed(x, rho, &cfg()).unwrap().value;
                assert!((taylor / closed - 1.0).abs() < 1e-6, "rho={rho}: {taylor} {closed}");
            }
        }
    }

    proptest::proptest! {
        #[test]
        fn rate_is_nonnegative(x in 0.02f64..6.0, rho in -1.5f64..1.5) {
            let v = rate_j(x, rho, &cfg()).unwrap();
            proptest::prop_assert!(v.value >= 0.0);
            proptest::prop_assert!(v.residual < 1e-12);
        }

        #[test]
        fn rate_is_monotone_away_from_the_limit(a in 0.02f64..6.0, b in 0.02f64..6.0, rho in -1.5f64..1.5) {
            let g = growth_factor(rho);
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            let jl = rate_j(lo, rho, &cfg()).unwrap().value;
            let jh = rate_j(hi, rho, &cfg()).unwrap().value;
            if lo >= g {
                proptest::prop_assert!(jh >= jl - 1e-14);
            } else if hi <= g {
                proptest::prop_assert!(jl >= jh - 1e-14);
            }
        }

        #[test]
        fn rate_vanishes_only_at_the_limit(rho in -1.5f64..1.5) {
            let v = rate_j(growth_factor(rho), rho, &cfg()).unwrap().value;
            proptest::prop_assert!(v.abs() < 1e-14);
        }

        #[test]
        fn branches_meet_continuously(rho in -1.5f64..1.5, eps in 1e-10f64..1e-3) {
            let edge = 1.0 + 0.5 * rho;
            let up = rate_j(edge + eps, rho, &cfg()).unwrap().value;
            let down = rate_j(edge - eps, rho, &cfg()).unwrap().value;
            let mid = boundary_rate(rho);
            // |dJ/dx| at the boundary stays below 100 for |rho| <= 1.5
            proptest::prop_assert!((up - mid).abs() <= 100.0 * eps + 1e-13);
            proptest::prop_assert!((down - mid).abs() <= 100.0 * eps + 1e-13);
        }

        #[test]
        fn lambda_is_decreasing_in_a(a in 0.01f64..5.0, f in 1.01f64..3.0, b in 0.2f64..2.0, rho in -1.0f64..1.0) {
            let l1 = lambda_mgf(a, b, rho).unwrap().value;
            let l2 = lambda_mgf(a * f, b, rho).unwrap().value;
            proptest::prop_assert!(l2 < l1);
            proptest::prop_assert!(l1 < 0.0);
        }
    }
}

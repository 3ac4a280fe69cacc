//! Brute-force oracles for the variational quantities.
//!
//! Paths `f(y)` are piecewise linear on `y_j = j / m` with `f(0) = 0`. The
//! action `1/2 int (f' - rho)^2` is the exact integral of that interpolant and
//! `int e^f` uses the trapezoid rule, so both discretisations carry `O(m^-2)`
//! error. Nothing here consults the closed forms.

use crate::error::{convergence, domain, Result};

/// Symmetric tridiagonal matrix: `diag[0..m]`, `off[i]` couples `i` and `i + 1`.
struct Tridiagonal {
    diag: Vec<f64>,
    off: Vec<f64>,
}

impl Tridiagonal {
    /// Thomas solve. `None` when a pivot is not positive.
    fn solve(&self, rhs: &[f64]) -> Option<Vec<f64>> {
        let m = self.diag.len();
        let mut c = vec![0.0; m];
        let mut d = vec![0.0; m];
        let mut piv = self.diag[0];
        if !(piv > 0.0) {
            return None;
        }
        c[0] = self.off.first().copied().unwrap_or(0.0) / piv;
        d[0] = rhs[0] / piv;
        for i in 1..m {
            piv = self.diag[i] - self.off[i - 1] * c[i - 1];
            if !(piv > 0.0) {
                return None;
            }
            if i + 1 < m {
                c[i] = self.off[i] / piv;
            }
            d[i] = (rhs[i] - self.off[i - 1] * d[i - 1]) / piv;
        }
        for i in (0..m - 1).rev() {
            d[i] -= c[i] * d[i + 1];
        }
        Some(d)
    }
}

/// Discretised path with unknowns `f_1..f_m`.
struct Grid {
    m: usize,
    h: f64,
    rho: f64,
}

impl Grid {
    fn new(m: usize, rho: f64) -> Self {
        Self { m, h: 1.0 / m as f64, rho }
    }

    fn weight(&self, j: usize) -> f64 {
        if j + 1 == self.m { 0.5 * self.h } else { self.h }
    }

    fn drift_line(&self) -> Vec<f64> {
        (1..=self.m).map(|j| self.rho * j as f64 * self.h).collect()
    }

    /// `1/2 int (f' - rho)^2`.
    fn action(&self, f: &[f64]) -> f64 {
        let mut prev = 0.0;
        let mut s = 0.0;
        for &x in f {
            let d = x - prev - self.rho * self.h;
            s += d * d;
            prev = x;
        }
        0.5 * s / self.h
    }

    fn action_grad(&self, f: &[f64]) -> Vec<f64> {
        let m = self.m;
        let mut g = vec![0.0; m];
        let mut prev = 0.0;
        for j in 0..m {
            let d = (f[j] - prev - self.rho * self.h) / self.h;
            g[j] += d;
            if j > 0 {
                g[j - 1] -= d;
            }
            prev = f[j];
        }
        g
    }

    /// Hessian of the action: `(1/h) tridiag(-1, 2, -1)` with a free end.
    fn action_hessian(&self) -> Tridiagonal {
        let mut diag = vec![2.0 / self.h; self.m];
        diag[self.m - 1] = 1.0 / self.h;
        Tridiagonal { diag, off: vec![-1.0 / self.h; self.m - 1] }
    }

    /// Trapezoid `int e^f`; the `f(0) = 0` endpoint contributes `h / 2`.
    fn integral(&self, f: &[f64]) -> f64 {
        0.5 * self.h + f.iter().enumerate().map(|(j, x)| self.weight(j) * x.exp()).sum::<f64>()
    }

    fn integral_grad(&self, f: &[f64]) -> Vec<f64> {
        f.iter().enumerate().map(|(j, x)| self.weight(j) * x.exp()).collect()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Minimises the convex `a int e^f + (1 / (2 b^2)) int (f' - rho)^2`.
fn minimise_mgf_functional(a: f64, b: f64, rho: f64, m: usize) -> Result<f64> {
    let grid = Grid::new(m, rho);
    let inv_b2 = 1.0 / (b * b);
    let objective = |f: &[f64]| a * grid.integral(f) + inv_b2 * grid.action(f);
    let mut f = grid.drift_line();
    let mut value = objective(&f);
    let base = grid.action_hessian();
    for _ in 0..200 {
        let ga = grid.action_grad(&f);
        let gi = grid.integral_grad(&f);
        let grad: Vec<f64> = ga.iter().zip(&gi).map(|(x, y)| inv_b2 * x + a * y).collect();
        let hess = Tridiagonal {
            diag: base.diag.iter().zip(&gi).map(|(d, y)| inv_b2 * d + a * y).collect(),
            off: base.off.iter().map(|o| inv_b2 * o).collect(),
        };
        let step = hess
            .solve(&grad)
            .ok_or_else(|| convergence("Hessian lost positive definiteness"))?;
        let decrement = dot(&grad, &step);
        if decrement < 1e-28 {
            return Ok(-value);
        }
        let mut t = 1.0;
        loop {
            let trial: Vec<f64> = f.iter().zip(&step).map(|(x, s)| x - t * s).collect();
            let tv = objective(&trial);
            if tv <= value - 1e-4 * t * decrement {
                if tv >= value {
                    return Ok(-value);
                }
                f = trial;
                value = tv;
                break;
            }
            t *= 0.5;
            if t < 1e-12 {
                // no further progress at working precision
                return Ok(-value);
            }
        }
    }
    Err(convergence("Newton iteration for the MGF functional did not converge"))
}

/// Discretised `sup_g { theta S0 int e^{b g} - 1/2 int (g' - rho/b)^2 }` with
/// `b = sqrt(2 beta)` on `grid_points` cells.
pub fn brute_force_lambda(theta: f64, spot: f64, beta: f64, rho: f64, grid_points: usize) -> Result<f64> {
    if !(theta <= 0.0) {
        return Err(domain(format!("theta must be non-positive, got {theta}")));
    }
    if !(spot > 0.0 && beta > 0.0) {
        return Err(domain("spot and beta must be positive"));
    }
    if grid_points < 2 {
        return Err(domain("need at least two grid cells"));
    }
    if theta == 0.0 {
        return Ok(0.0);
    }
    minimise_mgf_functional(-theta * spot, (2.0 * beta).sqrt(), rho, grid_points)
}

/// Richardson combination `(4 L(2m) - L(m)) / 3` of [`brute_force_lambda`].
pub fn brute_force_lambda_extrapolated(theta: f64, spot: f64, beta: f64, rho: f64, grid_points: usize) -> Result<f64> {
    let coarse = brute_force_lambda(theta, spot, beta, rho, grid_points)?;
    let fine = brute_force_lambda(theta, spot, beta, rho, 2 * grid_points)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

/// Inner solve of the augmented Lagrangian
/// `1/2 int (f' - rho)^2 + lam c + (mu / 2) c^2`, `c = int e^f - x`.
fn augmented_newton(grid: &Grid, f: &mut Vec<f64>, x: f64, lam: f64, mu: f64) -> Result<()> {
    let merit = |f: &[f64]| {
        let c = grid.integral(f) - x;
        grid.action(f) + lam * c + 0.5 * mu * c * c
    };
    let base = grid.action_hessian();
    let mut value = merit(f);
    let mut polish = 0;
    for _ in 0..100 {
        let c = grid.integral(f) - x;
        let weight = lam + mu * c;
        let u = grid.integral_grad(f);
        let grad: Vec<f64> = grid.action_grad(f).iter().zip(&u).map(|(g, ui)| g + weight * ui).collect();
        // Hessian = tridiagonal + mu u u^T; shift the diagonal until it factors
        let mut shift = 0.0;
        let (w, z) = loop {
            let hess = Tridiagonal {
                diag: base.diag.iter().zip(&u).map(|(d, ui)| d + weight * ui + shift).collect(),
                off: base.off.clone(),
            };
            match (hess.solve(&grad), hess.solve(&u)) {
                (Some(w), Some(z)) => break (w, z),
                _ => shift = if shift == 0.0 { 1.0 } else { 4.0 * shift },
            }
            if shift > 1e12 {
                return Err(convergence("could not regularise the augmented Hessian"));
            }
        };
        let k = mu * dot(&u, &w) / (1.0 + mu * dot(&u, &z));
        let step: Vec<f64> = w.iter().zip(&z).map(|(wi, zi)| wi - k * zi).collect();
        let mut decrement = dot(&grad, &step);
        let step = if decrement > 0.0 {
            step
        } else {
            decrement = dot(&grad, &grad);
            grad.clone()
        };
        if decrement < 1e-28 {
            return Ok(());
        }
        if decrement < 1e-12 {
            // quadratic convergence region; the merit is flat to rounding here,
            // so take plain Newton steps until the gradient hits its noise floor
            polish += 1;
            if polish > 3 {
                return Ok(());
            }
            for (a, s) in f.iter_mut().zip(&step) {
                *a -= s;
            }
            value = merit(f);
            continue;
        }
        let mut t = 1.0;
        loop {
            let trial: Vec<f64> = f.iter().zip(&step).map(|(a, s)| a - t * s).collect();
            let tv = merit(&trial);
            if tv <= value - 1e-4 * t * decrement {
                *f = trial;
                value = tv;
                break;
            }
            t *= 0.5;
            if t < 1e-14 {
                return Ok(());
            }
        }
    }
    Err(convergence("augmented-Lagrangian inner Newton did not converge"))
}

/// Discretised `inf { 1/2 int (f' - rho)^2 : f(0) = 0, int e^f = x_ratio }` by
/// augmented-Lagrangian iterations with continuation in `x_ratio` from the
/// drift line.
pub fn brute_force_rate(x_ratio: f64, rho: f64, grid_points: usize, penalty_weight: f64) -> Result<f64> {
    if !(x_ratio > 0.0 && x_ratio.is_finite()) {
        return Err(domain(format!("x/S0 must be positive, got {x_ratio}")));
    }
    if !(penalty_weight > 0.0) {
        return Err(domain("penalty weight must be positive"));
    }
    if grid_points < 2 {
        return Err(domain("need at least two grid cells"));
    }
    let grid = Grid::new(grid_points, rho);
    let mut f = grid.drift_line();
    let start = grid.integral(&f);
    let mut lam = 0.0;
    // geometric continuation in x keeps each solve close to the previous one
    let stages = 20;
    let ratio = (x_ratio / start).ln();
    for stage in 1..=stages {
        let x = start * (ratio * stage as f64 / stages as f64).exp();
        let mut converged = false;
        for _ in 0..200 {
            augmented_newton(&grid, &mut f, x, lam, penalty_weight)?;
            let c = grid.integral(&f) - x;
            lam += penalty_weight * c;
            if c.abs() < 1e-12 * x.max(1.0) {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(convergence(format!("constraint not met at x/S0 = {x}")));
        }
    }
    Ok(grid.action(&f))
}

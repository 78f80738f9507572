//! Quasi-Newton minimization for smooth unconstrained objectives.
//!
//! BFGS with a central-difference gradient and Armijo backtracking. The
//! estimation modules reparameterize constrained parameters (log for
//! positivity, a logistic pair for the GARCH persistence simplex) so the
//! optimizer only ever sees unconstrained coordinates. Objectives may
//! return `INFINITY` outside their numerical domain; the line search backs
//! off.

/// Options for [`minimize_bfgs`].
#[derive(Debug, Clone, Copy)]
pub struct OptimOptions {
    pub max_iters: usize,
    /// Converged when the gradient infinity norm drops below
    /// `grad_tol * max(1, |f|)`.
    pub grad_tol: f64,
    /// Also converged after `f` stalls within `f_tol * max(1, |f|)` twice.
    pub f_tol: f64,
}

impl Default for OptimOptions {
    fn default() -> Self {
        OptimOptions { max_iters: 500, grad_tol: 1e-6, f_tol: 1e-12 }
    }
}

/// Result of a minimization run.
#[derive(Debug, Clone)]
pub struct OptimResult {
    pub x: Vec<f64>,
    pub fx: f64,
    pub grad_norm: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Central-difference gradient with per-coordinate relative steps.
pub fn numeric_gradient<F: Fn(&[f64]) -> f64>(f: &F, x: &[f64]) -> Vec<f64> {
    let mut g = vec![0.0; x.len()];
    let mut xp = x.to_vec();
    for i in 0..x.len() {
        let h = 3e-6 * x[i].abs().max(1.0);
        let xi = x[i];
        xp[i] = xi + h;
        let fp = f(&xp);
        xp[i] = xi - h;
        let fm = f(&xp);
        xp[i] = xi;
        g[i] = (fp - fm) / (2.0 * h);
    }
    g
}

/// Central-difference Hessian.
///
/// Step sizes shrink automatically when a probe point is outside the
/// objective's domain (`f` not finite), which happens for estimates at a
/// constraint boundary. Entries that can never be evaluated are zero.
pub fn numeric_hessian<F: Fn(&[f64]) -> f64>(f: &F, x: &[f64]) -> Vec<Vec<f64>> {
    let n = x.len();
    let mut steps = vec![0.0; n];
    let mut probe = x.to_vec();
    for i in 0..n {
        let mut h = 1e-4 * x[i].abs().max(1e-3);
        for _ in 0..40 {
            probe[i] = x[i] + h;
            let fp = f(&probe);
            probe[i] = x[i] - h;
            let fm = f(&probe);
            probe[i] = x[i];
            if fp.is_finite() && fm.is_finite() {
                break;
            }
            h *= 0.5;
        }
        steps[i] = h;
    }
    let f0 = f(x);
    let mut hess = vec![vec![0.0; n]; n];
    let mut xp = x.to_vec();
    for i in 0..n {
        let hi = steps[i];
        xp[i] = x[i] + hi;
        let fp = f(&xp);
        xp[i] = x[i] - hi;
        let fm = f(&xp);
        xp[i] = x[i];
        if fp.is_finite() && fm.is_finite() {
            hess[i][i] = (fp - 2.0 * f0 + fm) / (hi * hi);
        }
        for j in 0..i {
            let hj = steps[j];
            xp[i] = x[i] + hi;
            xp[j] = x[j] + hj;
            let fpp = f(&xp);
            xp[j] = x[j] - hj;
            let fpm = f(&xp);
            xp[i] = x[i] - hi;
            xp[j] = x[j] + hj;
            let fmp = f(&xp);
            xp[j] = x[j] - hj;
            let fmm = f(&xp);
            xp[i] = x[i];
            xp[j] = x[j];
            if fpp.is_finite() && fpm.is_finite() && fmp.is_finite() && fmm.is_finite() {
                let v = (fpp - fpm - fmp + fmm) / (4.0 * hi * hj);
                hess[i][j] = v;
                hess[j][i] = v;
            }
        }
    }
    hess
}

/// Minimize `f` from `x0` with BFGS.
pub fn minimize_bfgs<F: Fn(&[f64]) -> f64>(
    f: &F,
    x0: &[f64],
    opts: OptimOptions,
) -> OptimResult {
    let n = x0.len();
    let mut x = x0.to_vec();
    let mut fx = f(&x);
    if !fx.is_finite() {
        return OptimResult { x, fx, grad_norm: f64::INFINITY, iterations: 0, converged: false };
    }
    let mut g = numeric_gradient(f, &x);
    // Inverse Hessian approximation, kept dense; dimensions here are tiny.
    let mut h_inv = identity(n);
    let mut stalls = 0;

    for iter in 0..opts.max_iters {
        let gnorm = inf_norm(&g);
        if gnorm < opts.grad_tol * fx.abs().max(1.0) {
            return OptimResult { x, fx, grad_norm: gnorm, iterations: iter, converged: true };
        }

        let mut dir = mat_vec(&h_inv, &g);
        for d in &mut dir {
            *d = -*d;
        }
        let mut slope = dot(&dir, &g);
        if slope >= 0.0 {
            // Not a descent direction; reset to steepest descent.
            h_inv = identity(n);
            dir = g.iter().map(|v| -v).collect();
            slope = dot(&dir, &g);
        }

        // Armijo backtracking.
        let mut step = 1.0;
        let mut x_new = vec![0.0; n];
        let mut f_new = f64::INFINITY;
        let mut ok = false;
        for _ in 0..60 {
            for i in 0..n {
                x_new[i] = x[i] + step * dir[i];
            }
            f_new = f(&x_new);
            if f_new.is_finite() && f_new <= fx + 1e-4 * step * slope {
                ok = true;
                break;
            }
            step *= 0.5;
        }
        if !ok {
            // No progress possible along this direction.
            return OptimResult {
                x,
                fx,
                grad_norm: gnorm,
                iterations: iter,
                converged: gnorm < 1e-3 * fx.abs().max(1.0),
            };
        }

        let g_new = numeric_gradient(f, &x_new);
        let s: Vec<f64> = (0..n).map(|i| x_new[i] - x[i]).collect();
        let yv: Vec<f64> = (0..n).map(|i| g_new[i] - g[i]).collect();
        let sy = dot(&s, &yv);
        if sy > 1e-12 {
            bfgs_update(&mut h_inv, &s, &yv, sy);
        }

        let f_change = (fx - f_new).abs();
        if f_change <= opts.f_tol * fx.abs().max(1.0) {
            stalls += 1;
        } else {
            stalls = 0;
        }
        x = x_new;
        fx = f_new;
        g = g_new;
        if stalls >= 2 {
            let gnorm = inf_norm(&g);
            return OptimResult {
                x,
                fx,
                grad_norm: gnorm,
                iterations: iter + 1,
                converged: gnorm < 1e-3 * fx.abs().max(1.0),
            };
        }
    }
    let gnorm = inf_norm(&g);
    OptimResult { x, fx, grad_norm: gnorm, iterations: opts.max_iters, converged: false }
}

fn identity(n: usize) -> Vec<Vec<f64>> {
    let mut m = vec![vec![0.0; n]; n];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    m
}

fn mat_vec(m: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    m.iter().map(|row| dot(row, v)).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

/// BFGS inverse-Hessian update:
/// `H <- (I - s yᵀ/ρ) H (I - y sᵀ/ρ) + s sᵀ/ρ` with `ρ = yᵀs`.
fn bfgs_update(h: &mut [Vec<f64>], s: &[f64], y: &[f64], sy: f64) {
    let n = s.len();
    let hy = mat_vec(h, y);
    let yhy = dot(y, &hy);
    let c1 = (sy + yhy) / (sy * sy);
    let c2 = 1.0 / sy;
    for i in 0..n {
        for j in 0..n {
            h[i][j] += c1 * s[i] * s[j] - c2 * (hy[i] * s[j] + s[i] * hy[j]);
        }
    }
}

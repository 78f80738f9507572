//! Scalar DCC(1,1) correlation stage.
//!
//! Given standardized residuals `u_t`, the pseudo-correlation matrix
//! follows
//!
//! ```text
//! Q_t = (1 - alpha - beta)·Q̄ + alpha·u_{t-1}u'_{t-1} + beta·Q_{t-1}
//! ```
//!
//! with `Q_1 = Q̄` (the sample correlation of `u`) and `R_t =
//! diag(Q_t)^{-1/2} Q_t diag(Q_t)^{-1/2}`. The second-stage Gaussian
//! correlation log-likelihood
//!
//! ```text
//! L_C = -1/2 · Σ_t ( ln|R_t| + u_t'R_t⁻¹u_t - u_t'u_t )
//! ```
//!
//! is maximized over `alpha, beta >= 0`, `alpha + beta < 1` through the
//! same logistic-pair reparameterization the univariate stage uses.

use nalgebra::DMatrix;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::optim::{minimize_bfgs, numeric_hessian, OptimOptions};

use super::invert_for_se;

/// A per-time sequence of matrices (`Q_t`, `R_t` or `H_t`).
pub type MatrixPath = Vec<DMatrix<f64>>;

/// Fitted DCC(1,1) correlation dynamics.
#[derive(Debug, Clone, PartialEq)]
pub struct DccCorrelation {
    pub alpha: f64,
    pub beta: f64,
    /// Standard errors for `(alpha, beta)`.
    pub se: [f64; 2],
    pub tvalues: [f64; 2],
    pub pvalues: [f64; 2],
    /// Unconditional (sample) correlation of the standardized residuals.
    pub qbar: DMatrix<f64>,
    /// Pseudo-correlation path `Q_t`.
    pub q_path: MatrixPath,
    /// Conditional correlation path `R_t` (unit diagonal).
    pub r_path: MatrixPath,
    /// Maximized correlation log-likelihood.
    pub loglik: f64,
}

impl DccCorrelation {
    /// Boundary flags for `(alpha, beta)`; p-values are unreliable there.
    pub fn boundary_flags(&self) -> [bool; 2] {
        let near_one = self.alpha + self.beta > 1.0 - 1e-5;
        [self.alpha < 1e-5 || near_one, self.beta < 1e-5 || near_one]
    }
}

fn validate_residuals(u: &[Vec<f64>]) -> Result<usize> {
    if u.len() < 2 {
        return Err(Error::Argument(format!(
            "DCC needs at least 2 series, got {}",
            u.len()
        )));
    }
    let t_len = u[0].len();
    if u.iter().any(|s| s.len() != t_len) {
        return Err(Error::Argument("residual series have different lengths".into()));
    }
    if t_len < 50 {
        return Err(Error::Argument(format!(
            "DCC estimation needs at least 50 observations, got {t_len}"
        )));
    }
    Ok(t_len)
}

/// Sample correlation matrix of the residual series.
pub fn sample_correlation(u: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let m = u.len();
    let t_len = u[0].len();
    let means: Vec<f64> = u.iter().map(|s| s.iter().sum::<f64>() / t_len as f64).collect();
    let mut cov = DMatrix::zeros(m, m);
    for i in 0..m {
        for j in 0..=i {
            let acc: f64 = u[i]
                .iter()
                .zip(&u[j])
                .map(|(a, b)| (a - means[i]) * (b - means[j]))
                .sum();
            cov[(i, j)] = acc;
            cov[(j, i)] = acc;
        }
    }
    let mut corr = DMatrix::zeros(m, m);
    for i in 0..m {
        if cov[(i, i)] <= 0.0 {
            return Err(Error::Degenerate(format!("residual series {i} is constant")));
        }
    }
    for i in 0..m {
        for j in 0..m {
            corr[(i, j)] = cov[(i, j)] / (cov[(i, i)] * cov[(j, j)]).sqrt();
        }
    }
    Ok(corr)
}

/// In-place lower Cholesky; returns false when the matrix is not positive
/// definite. Only the lower triangle of `a` is referenced afterwards.
fn cholesky_in_place(a: &mut DMatrix<f64>) -> bool {
    let n = a.nrows();
    for j in 0..n {
        let mut d = a[(j, j)];
        for k in 0..j {
            d -= a[(j, k)] * a[(j, k)];
        }
        if !(d.is_finite() && d > 0.0) {
            return false;
        }
        let d = d.sqrt();
        a[(j, j)] = d;
        for i in j + 1..n {
            let mut v = a[(i, j)];
            for k in 0..j {
                v -= a[(i, k)] * a[(j, k)];
            }
            a[(i, j)] = v / d;
        }
    }
    true
}

/// Correlation negative log-likelihood for fixed `(alpha, beta)`.
///
/// Returns `INFINITY` when the recursion leaves the positive-definite cone
/// (which also covers invalid parameter probes during Hessian evaluation).
fn correlation_nll(
    u_t: &[Vec<f64>],
    qbar: &DMatrix<f64>,
    alpha: f64,
    beta: f64,
    mut record: Option<&mut (MatrixPath, MatrixPath)>,
) -> f64 {
    let m = qbar.nrows();
    let c = 1.0 - alpha - beta;
    let mut q = qbar.clone();
    let mut r = DMatrix::zeros(m, m);
    let mut l = DMatrix::zeros(m, m);
    let mut w = vec![0.0; m];
    let mut nll = 0.0;
    for (t, ut) in u_t.iter().enumerate() {
        if t > 0 {
            let prev = &u_t[t - 1];
            for i in 0..m {
                for j in 0..m {
                    q[(i, j)] = c * qbar[(i, j)] + alpha * prev[i] * prev[j] + beta * q[(i, j)];
                }
            }
        }
        for i in 0..m {
            let qi = q[(i, i)];
            if !(qi.is_finite() && qi > 0.0) {
                return f64::INFINITY;
            }
        }
        for i in 0..m {
            for j in 0..m {
                r[(i, j)] = q[(i, j)] / (q[(i, i)] * q[(j, j)]).sqrt();
            }
        }
        if let Some(paths) = record.as_deref_mut() {
            paths.0.push(q.clone());
            paths.1.push(r.clone());
        }
        l.copy_from(&r);
        if !cholesky_in_place(&mut l) {
            return f64::INFINITY;
        }
        let mut logdet = 0.0;
        for i in 0..m {
            logdet += l[(i, i)].ln();
        }
        logdet *= 2.0;
        // Solve L w = u; then u'R⁻¹u = w'w.
        let mut quad = 0.0;
        let mut uu = 0.0;
        for i in 0..m {
            let mut v = ut[i];
            for k in 0..i {
                v -= l[(i, k)] * w[k];
            }
            w[i] = v / l[(i, i)];
            quad += w[i] * w[i];
            uu += ut[i] * ut[i];
        }
        nll += 0.5 * (logdet + quad - uu);
    }
    nll
}

fn transpose_to_time_major(u: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let m = u.len();
    let t_len = u[0].len();
    (0..t_len).map(|t| (0..m).map(|i| u[i][t]).collect()).collect()
}

/// Run the `Q_t` recursion at fixed parameters, returning the `Q` and `R`
/// paths. This is the degenerate-case entry point: with `alpha = beta = 0`
/// the paths are constant at `Q̄`.
pub fn dcc_recursion(
    u: &[Vec<f64>],
    qbar: &DMatrix<f64>,
    alpha: f64,
    beta: f64,
) -> Result<(MatrixPath, MatrixPath)> {
    validate_residuals(u)?;
    let u_t = transpose_to_time_major(u);
    let mut paths = (Vec::with_capacity(u_t.len()), Vec::with_capacity(u_t.len()));
    let nll = correlation_nll(&u_t, qbar, alpha, beta, Some(&mut paths));
    if !nll.is_finite() {
        return Err(Error::estimation(
            "DCC recursion left the positive-definite cone",
        ));
    }
    Ok(paths)
}

fn logistic(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

fn logit(p: f64) -> f64 {
    (p / (1.0 - p)).ln()
}

/// Fit the DCC(1,1) correlation stage on standardized residuals.
pub fn fit_dcc_correlation(u: &[Vec<f64>]) -> Result<DccCorrelation> {
    validate_residuals(u)?;
    let qbar = sample_correlation(u)?;
    {
        let mut probe = qbar.clone();
        if !cholesky_in_place(&mut probe) {
            return Err(Error::estimation(
                "unconditional correlation matrix is not positive definite",
            ));
        }
    }
    let u_t = transpose_to_time_major(u);

    let objective = |theta: &[f64]| {
        let s = logistic(theta[0]);
        let f = logistic(theta[1]);
        correlation_nll(&u_t, &qbar, s * f, s * (1.0 - f), None)
    };
    // Diverse starts over (persistence, alpha-fraction); the first sits in
    // the customary high-persistence region.
    let starts: Vec<[f64; 2]> = [(0.95, 0.05 / 0.95), (0.5, 0.5), (0.3, 0.8), (0.98, 0.01), (0.7, 0.2)]
        .into_iter()
        .map(|(s, f): (f64, f64)| [logit(s), logit(f)])
        .collect();
    let mut best: Option<crate::optim::OptimResult> = None;
    for start in starts {
        let run = minimize_bfgs(&objective, &start, OptimOptions::default());
        let better = best.as_ref().is_none_or(|b| run.fx < b.fx);
        if better {
            best = Some(run);
        }
        if best.as_ref().is_some_and(|b| b.converged) {
            break;
        }
    }
    let best = best.expect("at least one start ran");
    if !best.converged || !best.fx.is_finite() {
        return Err(Error::Estimation {
            message: "DCC optimizer did not converge".into(),
            best_loglik: best.fx.is_finite().then_some(-best.fx),
        });
    }

    let s = logistic(best.x[0]);
    let f = logistic(best.x[1]);
    let (alpha, beta) = (s * f, s * (1.0 - f));
    let mut paths = (Vec::new(), Vec::new());
    let nll_opt = correlation_nll(&u_t, &qbar, alpha, beta, Some(&mut paths));

    let se_objective = |v: &[f64]| correlation_nll(&u_t, &qbar, v[0], v[1], None);
    let hessian = numeric_hessian(&se_objective, &[alpha, beta]);
    let se = invert_for_se(&hessian);
    let normal = Normal::standard();
    let estimates = [alpha, beta];
    let mut tvalues = [0.0; 2];
    let mut pvalues = [0.0; 2];
    for i in 0..2 {
        tvalues[i] = estimates[i] / se[i];
        pvalues[i] = if tvalues[i].is_finite() {
            2.0 * (1.0 - normal.cdf(tvalues[i].abs()))
        } else {
            f64::NAN
        };
    }

    Ok(DccCorrelation {
        alpha,
        beta,
        se: [se[0], se[1]],
        tvalues,
        pvalues,
        qbar,
        q_path: paths.0,
        r_path: paths.1,
        loglik: -nll_opt,
    })
}

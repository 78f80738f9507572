//! AR(1)+GARCH(1,1) Gaussian maximum likelihood.
//!
//! Model: `r_t = mu + ar1·r_{t-1} + eps_t`, `sigma2_t = omega +
//! alpha1·eps2_{t-1} + beta1·sigma2_{t-1}`, `eps_t = sigma_t · z_t` with
//! standard normal `z`. The first conditional variance is the mean squared
//! residual at the current mean parameters.
//!
//! Optimization runs on an unconstrained reparameterization (`atanh` for
//! the AR coefficient, `ln` for omega, a logistic pair for the
//! `alpha1 + beta1 < 1` simplex) over the standardized series; standard
//! errors come from the numerical Hessian of the negative log-likelihood in
//! the original parameter space, so boundary estimates still get the
//! conventional reported errors.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::optim::{minimize_bfgs, numeric_hessian, OptimOptions, OptimResult};

use super::invert_for_se;

const LN_2PI: f64 = 1.8378770664093453;

/// Fitted AR(1)+GARCH(1,1) model for one series.
///
/// `eps`, `sigma2` and `u` run from the second observation (the first is
/// consumed by the AR term), so their length is `n - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct GarchFit {
    pub mu: f64,
    pub ar1: f64,
    pub omega: f64,
    pub alpha1: f64,
    pub beta1: f64,
    /// Standard errors in parameter order (mu, ar1, omega, alpha1, beta1).
    pub se: [f64; 5],
    pub tvalues: [f64; 5],
    pub pvalues: [f64; 5],
    pub loglik: f64,
    /// Residuals `eps_t`.
    pub eps: Vec<f64>,
    /// Conditional variances `sigma2_t`.
    pub sigma2: Vec<f64>,
    /// Standardized residuals `u_t = eps_t / sigma_t`.
    pub u: Vec<f64>,
}

impl GarchFit {
    pub const PARAM_NAMES: [&'static str; 5] = ["mu", "ar1", "omega", "alpha1", "beta1"];

    pub fn estimates(&self) -> [f64; 5] {
        [self.mu, self.ar1, self.omega, self.alpha1, self.beta1]
    }

    /// Which parameters sit numerically on a constraint boundary.
    ///
    /// Asymptotic-normal p-values are unreliable for flagged parameters.
    pub fn boundary_flags(&self) -> [bool; 5] {
        let var_scale = self.sigma2.iter().sum::<f64>() / self.sigma2.len() as f64;
        [
            false,
            self.ar1.abs() > 1.0 - 1e-5,
            self.omega < 1e-10 * var_scale.max(f64::MIN_POSITIVE),
            self.alpha1 < 1e-5 || self.alpha1 + self.beta1 > 1.0 - 1e-5,
            self.beta1 < 1e-5 || self.alpha1 + self.beta1 > 1.0 - 1e-5,
        ]
    }
}

#[derive(Debug, Clone, Copy)]
struct Params {
    mu: f64,
    ar1: f64,
    omega: f64,
    alpha1: f64,
    beta1: f64,
}

fn logistic(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

fn logit(p: f64) -> f64 {
    (p / (1.0 - p)).ln()
}

/// Unconstrained vector -> model parameters.
fn from_unconstrained(theta: &[f64]) -> Params {
    let s = logistic(theta[3]);
    let f = logistic(theta[4]);
    Params {
        mu: theta[0],
        ar1: theta[1].tanh(),
        omega: theta[2].exp(),
        alpha1: s * f,
        beta1: s * (1.0 - f),
    }
}

fn to_unconstrained(p: &Params) -> [f64; 5] {
    let s = (p.alpha1 + p.beta1).clamp(1e-8, 1.0 - 1e-8);
    let f = (p.alpha1 / s).clamp(1e-8, 1.0 - 1e-8);
    [p.mu, p.ar1.clamp(-0.999, 0.999).atanh(), p.omega.ln(), logit(s), logit(f)]
}

/// Residuals and conditional variances for the recursion; `None` when a
/// variance is non-positive or non-finite.
fn filter(x: &[f64], p: &Params) -> Option<(Vec<f64>, Vec<f64>)> {
    let n = x.len();
    let mut eps = Vec::with_capacity(n - 1);
    for t in 1..n {
        eps.push(x[t] - p.mu - p.ar1 * x[t - 1]);
    }
    let init = eps.iter().map(|e| e * e).sum::<f64>() / eps.len() as f64;
    if !(init.is_finite() && init > 0.0) {
        return None;
    }
    let mut sigma2 = Vec::with_capacity(eps.len());
    sigma2.push(init);
    for i in 1..eps.len() {
        let s2 = p.omega + p.alpha1 * eps[i - 1] * eps[i - 1] + p.beta1 * sigma2[i - 1];
        if !(s2.is_finite() && s2 > 0.0) {
            return None;
        }
        sigma2.push(s2);
    }
    Some((eps, sigma2))
}

/// Negative log-likelihood (sum over observations).
fn nll(x: &[f64], p: &Params) -> f64 {
    match filter(x, p) {
        Some((eps, sigma2)) => {
            let mut acc = 0.0;
            for (e, s2) in eps.iter().zip(&sigma2) {
                acc += LN_2PI + s2.ln() + e * e / s2;
            }
            0.5 * acc
        }
        None => f64::INFINITY,
    }
}

fn lag1_autocorr(x: &[f64]) -> f64 {
    let m = x.iter().sum::<f64>() / x.len() as f64;
    let denom: f64 = x.iter().map(|v| (v - m) * (v - m)).sum();
    if denom == 0.0 {
        return 0.0;
    }
    let num: f64 = (1..x.len()).map(|t| (x[t] - m) * (x[t - 1] - m)).sum();
    num / denom
}

/// Diverse starting points spanning the persistence range. GARCH
/// likelihoods flatten into a ridge when the ARCH effect is absent, so a
/// single high-persistence start can strand the optimizer at an arbitrary
/// point of the ridge.
fn start_points(z: &[f64]) -> Vec<Params> {
    let ar1 = lag1_autocorr(z).clamp(-0.9, 0.9);
    let mz = z.iter().sum::<f64>() / z.len() as f64;
    let mu = mz * (1.0 - ar1);
    let resid_var = {
        let mut acc = 0.0;
        for t in 1..z.len() {
            let e = z[t] - mu - ar1 * z[t - 1];
            acc += e * e;
        }
        (acc / (z.len() - 1) as f64).max(1e-8)
    };
    [(0.10, 0.80), (0.05, 0.10), (0.01, 0.01), (0.20, 0.50), (0.02, 0.95)]
        .into_iter()
        .map(|(alpha1, beta1)| Params {
            mu,
            ar1,
            omega: resid_var * (1.0 - alpha1 - beta1),
            alpha1,
            beta1,
        })
        .collect()
}

/// Fit an AR(1)+GARCH(1,1) model by Gaussian MLE.
///
/// The optimizer restarts from jittered points up to five times; if no run
/// converges this is an estimation error carrying the best log-likelihood
/// reached.
pub fn fit_ar1_garch11(x: &[f64]) -> Result<GarchFit> {
    let n = x.len();
    if n < 50 {
        return Err(Error::Argument(format!(
            "GARCH estimation needs at least 50 observations, got {n}"
        )));
    }
    if x.windows(2).all(|w| w[0] == w[1]) {
        return Err(Error::Degenerate("constant series has no GARCH dynamics".into()));
    }

    // Standardize for optimization; parameters are mapped back afterwards.
    let m = x.iter().sum::<f64>() / n as f64;
    let sd = (x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (n - 1) as f64).sqrt();
    let z: Vec<f64> = x.iter().map(|v| (v - m) / sd).collect();

    let objective = |theta: &[f64]| nll(&z, &from_unconstrained(theta));

    let mut converged: Vec<OptimResult> = Vec::new();
    let mut best_any: Option<OptimResult> = None;
    for start in start_points(&z) {
        let run = minimize_bfgs(&objective, &to_unconstrained(&start), OptimOptions::default());
        if best_any.as_ref().is_none_or(|b| run.fx < b.fx) {
            best_any = Some(run.clone());
        }
        if run.converged && run.fx.is_finite() {
            converged.push(run);
        }
    }
    if converged.is_empty() {
        // Jittered restarts from the best point reached before giving up.
        let mut rng = ChaCha8Rng::seed_from_u64(0x6a5c_17e3);
        for _ in 0..5 {
            let base = best_any.as_ref().expect("at least one start ran").x.clone();
            let start: Vec<f64> = base
                .iter()
                .map(|&v| v + 0.5 * rng.sample::<f64, _>(rand_distr::StandardNormal))
                .collect();
            let run = minimize_bfgs(&objective, &start, OptimOptions::default());
            if best_any.as_ref().is_none_or(|b| run.fx < b.fx) {
                best_any = Some(run.clone());
            }
            if run.converged && run.fx.is_finite() {
                converged.push(run);
                break;
            }
        }
    }
    if converged.is_empty() {
        let best_any = best_any.expect("at least one start ran");
        return Err(Error::Estimation {
            message: "GARCH optimizer did not converge after restarts".into(),
            best_loglik: best_any
                .fx
                .is_finite()
                .then(|| -(best_any.fx + (n as f64 - 1.0) * sd.ln())),
        });
    }
    // Likelihood decides; on a flat ridge (all runs within the optimizer's
    // own tolerance) take the least persistent parameterization.
    let best_fx = converged.iter().map(|r| r.fx).fold(f64::INFINITY, f64::min);
    let window = 1e-6 * n as f64;
    let best = converged
        .into_iter()
        .filter(|r| r.fx <= best_fx + window)
        .min_by(|a, b| {
            let pa = from_unconstrained(&a.x);
            let pb = from_unconstrained(&b.x);
            (pa.alpha1 + pa.beta1).partial_cmp(&(pb.alpha1 + pb.beta1)).unwrap()
        })
        .expect("non-empty converged set");

    // Map the optimum back to the original scale:
    // x_t = m + sd·z_t, so mu_x = m(1 - ar1) + sd·mu_z and omega_x = sd²·omega_z.
    let pz = from_unconstrained(&best.x);
    let p = Params {
        mu: m * (1.0 - pz.ar1) + sd * pz.mu,
        ar1: pz.ar1,
        omega: sd * sd * pz.omega,
        alpha1: pz.alpha1,
        beta1: pz.beta1,
    };
    let (eps, sigma2) =
        filter(x, &p).ok_or_else(|| Error::estimation("fitted variance path is not positive"))?;
    let u: Vec<f64> = eps.iter().zip(&sigma2).map(|(e, s2)| e / s2.sqrt()).collect();
    let loglik = -nll(x, &p);

    // Standard errors from the original-space Hessian. Evaluation only
    // requires a positive variance path, so probes slightly past a
    // constraint boundary still work.
    let se_objective = |v: &[f64]| {
        nll(x, &Params { mu: v[0], ar1: v[1], omega: v[2], alpha1: v[3], beta1: v[4] })
    };
    let point = [p.mu, p.ar1, p.omega, p.alpha1, p.beta1];
    let hessian = numeric_hessian(&se_objective, &point);
    let se = invert_for_se(&hessian);

    let normal = Normal::standard();
    let estimates = [p.mu, p.ar1, p.omega, p.alpha1, p.beta1];
    let mut tvalues = [0.0; 5];
    let mut pvalues = [0.0; 5];
    for i in 0..5 {
        tvalues[i] = estimates[i] / se[i];
        pvalues[i] = if tvalues[i].is_finite() {
            2.0 * (1.0 - normal.cdf(tvalues[i].abs()))
        } else {
            f64::NAN
        };
    }

    Ok(GarchFit {
        mu: p.mu,
        ar1: p.ar1,
        omega: p.omega,
        alpha1: p.alpha1,
        beta1: p.beta1,
        se,
        tvalues,
        pvalues,
        loglik,
        eps,
        sigma2,
        u,
    })
}

/// Negative log-likelihood at explicit parameter values, for diagnostics
/// and tests. Parameter order matches [`GarchFit::PARAM_NAMES`].
pub fn garch_nll(x: &[f64], params: &[f64; 5]) -> f64 {
    nll(
        x,
        &Params {
            mu: params[0],
            ar1: params[1],
            omega: params[2],
            alpha1: params[3],
            beta1: params[4],
        },
    )
}

/// Mean negative log-likelihood in the unconstrained parameterization of
/// the standardized series; used to verify first-order conditions at the
/// reported optimum.
pub fn mean_nll_unconstrained(x: &[f64], fit: &GarchFit) -> (Vec<f64>, impl Fn(&[f64]) -> f64) {
    let n = x.len();
    let m = x.iter().sum::<f64>() / n as f64;
    let sd = (x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (n - 1) as f64).sqrt();
    let z: Vec<f64> = x.iter().map(|v| (v - m) / sd).collect();
    let pz = Params {
        mu: (fit.mu - m * (1.0 - fit.ar1)) / sd,
        ar1: fit.ar1,
        omega: fit.omega / (sd * sd),
        alpha1: fit.alpha1,
        beta1: fit.beta1,
    };
    let theta = to_unconstrained(&pz).to_vec();
    let scale = 1.0 / (n as f64 - 1.0);
    (theta, move |t: &[f64]| nll(&z, &from_unconstrained(t)) * scale)
}

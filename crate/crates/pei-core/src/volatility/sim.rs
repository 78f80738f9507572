//! Seeded simulators for AR(1)+GARCH(1,1) and DCC processes.
//!
//! These exist for simulate-and-refit checks and synthetic demo data; they
//! share no code with the estimation path.

use nalgebra::DMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// True parameters for an AR(1)+GARCH(1,1) process.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GarchParams {
    pub mu: f64,
    pub ar1: f64,
    pub omega: f64,
    pub alpha1: f64,
    pub beta1: f64,
}

/// Simulate `n` observations after a 200-step burn-in.
pub fn simulate_ar1_garch11(p: &GarchParams, n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let burn = 200;
    let persistence = p.alpha1 + p.beta1;
    let mut sigma2 = if persistence < 1.0 && p.omega > 0.0 {
        p.omega / (1.0 - persistence)
    } else {
        p.omega.max(1.0)
    };
    let mut prev = p.mu / (1.0 - p.ar1.min(0.999));
    let mut out = Vec::with_capacity(n);
    for t in 0..burn + n {
        let z: f64 = rng.sample(StandardNormal);
        let eps = sigma2.sqrt() * z;
        let r = p.mu + p.ar1 * prev + eps;
        if t >= burn {
            out.push(r);
        }
        sigma2 = p.omega + p.alpha1 * eps * eps + p.beta1 * sigma2;
        prev = r;
    }
    out
}

fn lower_cholesky(a: &DMatrix<f64>) -> DMatrix<f64> {
    a.clone()
        .cholesky()
        .expect("simulation correlation matrix must be positive definite")
        .l()
}

fn normalize_to_correlation(q: &DMatrix<f64>) -> DMatrix<f64> {
    let m = q.nrows();
    DMatrix::from_fn(m, m, |i, j| q[(i, j)] / (q[(i, i)] * q[(j, j)]).sqrt())
}

/// Draw `n` vectors with constant correlation `r`; series-major output.
pub fn correlated_normals(r: &DMatrix<f64>, n: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = r.nrows();
    let l = lower_cholesky(r);
    let mut out = vec![Vec::with_capacity(n); m];
    let mut z = vec![0.0; m];
    for _ in 0..n {
        for zi in z.iter_mut() {
            *zi = rng.sample(StandardNormal);
        }
        for i in 0..m {
            let mut v = 0.0;
            for k in 0..=i {
                v += l[(i, k)] * z[k];
            }
            out[i].push(v);
        }
    }
    out
}

/// Simulate standardized residuals from a scalar DCC(1,1) recursion with
/// unconditional correlation `qbar`; 100-step burn-in, series-major output.
pub fn simulate_dcc_u(
    qbar: &DMatrix<f64>,
    alpha: f64,
    beta: f64,
    n: usize,
    seed: u64,
) -> Vec<Vec<f64>> {
    assert!(alpha >= 0.0 && beta >= 0.0 && alpha + beta < 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = qbar.nrows();
    let burn = 100;
    let c = 1.0 - alpha - beta;
    let mut q = qbar.clone();
    let mut out = vec![Vec::with_capacity(n); m];
    let mut z = vec![0.0; m];
    let mut u = vec![0.0; m];
    for t in 0..burn + n {
        let r = normalize_to_correlation(&q);
        let l = lower_cholesky(&r);
        for zi in z.iter_mut() {
            *zi = rng.sample(StandardNormal);
        }
        for i in 0..m {
            let mut v = 0.0;
            for k in 0..=i {
                v += l[(i, k)] * z[k];
            }
            u[i] = v;
        }
        if t >= burn {
            for i in 0..m {
                out[i].push(u[i]);
            }
        }
        for i in 0..m {
            for j in 0..m {
                q[(i, j)] = c * qbar[(i, j)] + alpha * u[i] * u[j] + beta * q[(i, j)];
            }
        }
    }
    out
}

//! Stationarity and dependence diagnostics: sample ACF, Ljung–Box test,
//! augmented Dickey–Fuller test, lagged cross-correlation and its shape
//! classification.
//!
//! Conventions:
//! - ACF uses the divisor-`n` estimator (numerator over the overlapping
//!   window, denominator over the full centered sum of squares).
//! - The ADF p-value is interpolated from the standard Dickey–Fuller
//!   critical-value tables (Fuller 1976, as tabulated in Banerjee et al.
//!   1993) and clipped to `[0.01, 0.99]`.
//! - The cross-correlation `rho[k] = corr(y_t, x_{t-k})`: positive `k`
//!   means `y` follows `x`.

use nalgebra::{Cholesky, DMatrix, DVector};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};

fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

fn is_constant(x: &[f64]) -> bool {
    x.windows(2).all(|w| w[0] == w[1])
}

/// Sample autocorrelations `rho[0..=max_lag]` with the divisor-n convention.
pub fn acf(x: &[f64], max_lag: usize) -> Result<Vec<f64>> {
    if max_lag < 1 || x.len() <= max_lag {
        return Err(Error::Argument(format!(
            "need series longer than max_lag >= 1, got n = {}, max_lag = {max_lag}",
            x.len()
        )));
    }
    if is_constant(x) {
        return Err(Error::Degenerate("constant series has no autocorrelation".into()));
    }
    let m = mean(x);
    let denom: f64 = x.iter().map(|&v| (v - m) * (v - m)).sum();
    let mut rho = Vec::with_capacity(max_lag + 1);
    rho.push(1.0);
    for k in 1..=max_lag {
        let num: f64 = (k..x.len()).map(|t| (x[t] - m) * (x[t - k] - m)).sum();
        rho.push(num / denom);
    }
    Ok(rho)
}

/// Ljung–Box statistic and p-value from precomputed autocorrelations.
///
/// `rho` must contain at least `h + 1` entries (`rho[0] = 1` unused).
pub fn ljung_box_from_acf(rho: &[f64], n: usize, h: usize) -> (f64, f64) {
    let nf = n as f64;
    let q: f64 = (1..=h)
        .map(|k| rho[k] * rho[k] / (nf - k as f64))
        .sum::<f64>()
        * nf
        * (nf + 2.0);
    let chi = ChiSquared::new(h as f64).expect("h >= 1");
    let p = 1.0 - chi.cdf(q);
    (q, p)
}

/// Ljung–Box white-noise test at `h` lags: `(Q, p)`.
pub fn ljung_box(x: &[f64], h: usize) -> Result<(f64, f64)> {
    let rho = acf(x, h)?;
    Ok(ljung_box_from_acf(&rho, x.len(), h))
}

/// Deterministic terms of the ADF regression.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdfSpec {
    /// No deterministic terms.
    NoConstant,
    /// Constant.
    Constant,
    /// Constant and linear trend.
    ConstantTrend,
}

impl AdfSpec {
    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "nc" => Ok(AdfSpec::NoConstant),
            "c" => Ok(AdfSpec::Constant),
            "ct" => Ok(AdfSpec::ConstantTrend),
            other => Err(Error::Argument(format!(
                "unknown ADF spec '{other}' (expected nc, c or ct)"
            ))),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            AdfSpec::NoConstant => "NC",
            AdfSpec::Constant => "C",
            AdfSpec::ConstantTrend => "CT",
        }
    }
}

/// Augmented Dickey–Fuller test outcome.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdfResult {
    pub spec: AdfSpec,
    /// t-ratio of the lagged-level coefficient.
    pub statistic: f64,
    /// Interpolated from the Dickey–Fuller tables, clipped to [0.01, 0.99].
    pub p_value: f64,
    pub lags: usize,
}

/// Augmented Dickey–Fuller unit-root test.
///
/// Regression: `Δy_t = γ·y_{t-1} + Σ δ_i·Δy_{t-i} + [c] + [b·t]` with lag
/// order `lags` (default `floor((n-1)^{1/3})`).
pub fn adf_test(x: &[f64], spec: AdfSpec, lags: Option<usize>) -> Result<AdfResult> {
    let n = x.len();
    let lags = lags.unwrap_or_else(|| ((n as f64 - 1.0).cbrt().floor()) as usize);
    if n < 20 + lags {
        return Err(Error::Argument(format!(
            "ADF needs at least {} observations for {lags} lags, got {n}",
            20 + lags
        )));
    }
    if is_constant(x) {
        return Err(Error::Degenerate("constant series has no unit-root test".into()));
    }

    let dy: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    // Usable t: need y_{t-1} and `lags` lagged differences.
    let n_eff = dy.len() - lags;
    let k = 1 + lags
        + match spec {
            AdfSpec::NoConstant => 0,
            AdfSpec::Constant => 1,
            AdfSpec::ConstantTrend => 2,
        };
    let mut design = DMatrix::zeros(n_eff, k);
    let mut response = DVector::zeros(n_eff);
    for (row, t) in (lags..dy.len()).enumerate() {
        response[row] = dy[t];
        design[(row, 0)] = x[t]; // y_{t-1} for Δy indexed by t
        for i in 1..=lags {
            design[(row, i)] = dy[t - i];
        }
        match spec {
            AdfSpec::NoConstant => {}
            AdfSpec::Constant => design[(row, 1 + lags)] = 1.0,
            AdfSpec::ConstantTrend => {
                design[(row, 1 + lags)] = 1.0;
                design[(row, 2 + lags)] = (row + 1) as f64;
            }
        }
    }

    let xtx = design.transpose() * &design;
    let xty = design.transpose() * &response;
    let chol = Cholesky::new(xtx)
        .ok_or_else(|| Error::Degenerate("singular ADF regression".into()))?;
    let coef = chol.solve(&xty);
    let fitted = &design * &coef;
    let rss: f64 = (&response - fitted).iter().map(|e| e * e).sum();
    if n_eff <= k {
        return Err(Error::Argument("not enough observations for the ADF regression".into()));
    }
    let sigma2 = rss / (n_eff - k) as f64;
    let xtx_inv_00 = chol.inverse()[(0, 0)];
    let se = (sigma2 * xtx_inv_00).sqrt();
    if !se.is_finite() || se == 0.0 {
        return Err(Error::Degenerate("singular ADF regression".into()));
    }
    let statistic = coef[0] / se;
    let p_value = df_tables::p_value(spec, n_eff, statistic);
    Ok(AdfResult { spec, statistic, p_value, lags })
}

/// Embedded Dickey–Fuller critical values and p-value interpolation.
// Tabulated statistics happen to include values near mathematical constants.
#[allow(clippy::approx_constant)]
mod df_tables {
    use super::AdfSpec;

    const PROBS: [f64; 8] = [0.01, 0.025, 0.05, 0.10, 0.90, 0.95, 0.975, 0.99];
    /// Row sample sizes; the last row is the asymptotic table.
    const SIZES: [f64; 6] = [25.0, 50.0, 100.0, 250.0, 500.0, f64::INFINITY];

    const TAU_NC: [[f64; 8]; 6] = [
        [-2.66, -2.26, -1.95, -1.60, 0.92, 1.33, 1.70, 2.16],
        [-2.62, -2.25, -1.95, -1.61, 0.91, 1.31, 1.66, 2.08],
        [-2.60, -2.24, -1.95, -1.61, 0.90, 1.29, 1.64, 2.03],
        [-2.58, -2.23, -1.95, -1.62, 0.89, 1.29, 1.63, 2.01],
        [-2.58, -2.23, -1.95, -1.62, 0.89, 1.28, 1.62, 2.00],
        [-2.58, -2.23, -1.95, -1.62, 0.89, 1.28, 1.62, 2.00],
    ];
    const TAU_C: [[f64; 8]; 6] = [
        [-3.75, -3.33, -3.00, -2.63, -0.37, 0.00, 0.34, 0.72],
        [-3.58, -3.22, -2.93, -2.60, -0.40, -0.03, 0.29, 0.66],
        [-3.51, -3.17, -2.89, -2.58, -0.42, -0.05, 0.26, 0.63],
        [-3.46, -3.14, -2.88, -2.57, -0.42, -0.06, 0.24, 0.62],
        [-3.44, -3.13, -2.87, -2.57, -0.43, -0.07, 0.24, 0.61],
        [-3.43, -3.12, -2.86, -2.57, -0.44, -0.07, 0.23, 0.60],
    ];
    const TAU_CT: [[f64; 8]; 6] = [
        [-4.38, -3.95, -3.60, -3.24, -1.14, -0.80, -0.50, -0.15],
        [-4.15, -3.80, -3.50, -3.18, -1.19, -0.87, -0.58, -0.24],
        [-4.04, -3.73, -3.45, -3.15, -1.22, -0.90, -0.62, -0.28],
        [-3.99, -3.69, -3.43, -3.13, -1.23, -0.92, -0.64, -0.31],
        [-3.98, -3.68, -3.42, -3.13, -1.24, -0.93, -0.65, -0.32],
        [-3.96, -3.66, -3.41, -3.12, -1.25, -0.94, -0.66, -0.33],
    ];

    fn table(spec: AdfSpec) -> &'static [[f64; 8]; 6] {
        match spec {
            AdfSpec::NoConstant => &TAU_NC,
            AdfSpec::Constant => &TAU_C,
            AdfSpec::ConstantTrend => &TAU_CT,
        }
    }

    /// Critical values for sample size `n`, interpolated linearly in `1/n`
    /// between the bracketing table rows.
    fn critical_values(spec: AdfSpec, n: usize) -> [f64; 8] {
        let rows = table(spec);
        let n = (n as f64).max(SIZES[0]);
        let inv = 1.0 / n;
        // SIZES is increasing so 1/SIZES is decreasing; find the bracket.
        let mut lo = rows.len() - 1; // larger n (smaller 1/n)
        let mut hi = 0;
        for i in 0..SIZES.len() - 1 {
            let inv_a = 1.0 / SIZES[i];
            let inv_b = 1.0 / SIZES[i + 1];
            if inv <= inv_a && inv >= inv_b {
                hi = i;
                lo = i + 1;
                break;
            }
        }
        let inv_hi = 1.0 / SIZES[hi];
        let inv_lo = 1.0 / SIZES[lo];
        let w = if inv_hi == inv_lo { 0.0 } else { (inv - inv_lo) / (inv_hi - inv_lo) };
        let mut out = [0.0; 8];
        for j in 0..8 {
            out[j] = rows[lo][j] + w * (rows[hi][j] - rows[lo][j]);
        }
        out
    }

    /// p-value for a test statistic: linear interpolation across the
    /// tabulated quantiles, clipped to [0.01, 0.99].
    pub fn p_value(spec: AdfSpec, n: usize, statistic: f64) -> f64 {
        let cv = critical_values(spec, n);
        if statistic <= cv[0] {
            return 0.01;
        }
        if statistic >= cv[7] {
            return 0.99;
        }
        for j in 0..7 {
            if statistic <= cv[j + 1] {
                let w = (statistic - cv[j]) / (cv[j + 1] - cv[j]);
                return PROBS[j] + w * (PROBS[j + 1] - PROBS[j]);
            }
        }
        0.99
    }

    #[cfg(test)]
    mod tests {
        use super::*;

        #[test]
        fn clips_to_bounds() {
            assert_eq!(p_value(AdfSpec::Constant, 500, -10.0), 0.01);
            assert_eq!(p_value(AdfSpec::Constant, 500, 10.0), 0.99);
        }

        #[test]
        fn hits_tabulated_quantiles() {
            // At n = 500 the table row applies directly.
            let p = p_value(AdfSpec::Constant, 500, -2.87);
            assert!((p - 0.05).abs() < 1e-12);
            let p = p_value(AdfSpec::ConstantTrend, 500, -3.13);
            assert!((p - 0.10).abs() < 1e-12);
        }

        #[test]
        fn interpolates_between_rows() {
            // Between n=100 and n=250 the 5% value sits between -2.89 and -2.88.
            let cv = critical_values(AdfSpec::Constant, 150);
            assert!(cv[2] > -2.89 && cv[2] < -2.88);
        }

        #[test]
        fn small_samples_clamp_to_first_row() {
            let cv = critical_values(AdfSpec::NoConstant, 10);
            assert_eq!(cv[0], -2.66);
        }
    }
}

/// Lagged cross-correlation between two equal-length series.
#[derive(Debug, Clone, PartialEq)]
pub struct CcfResult {
    /// Maximum lag `K`; correlations cover `k` in `[-K, K]`.
    pub max_lag: usize,
    /// `rho` indexed by `k + K`.
    rho: Vec<f64>,
    pub n: usize,
    /// Approximate white-noise band `2/sqrt(n)`.
    pub band: f64,
}

impl CcfResult {
    /// Correlation at lag `k` (panics when `|k| > K`).
    pub fn rho(&self, k: i64) -> f64 {
        let idx = k + self.max_lag as i64;
        self.rho[usize::try_from(idx).expect("lag within [-K, K]")]
    }

    pub fn lags(&self) -> impl Iterator<Item = i64> + '_ {
        -(self.max_lag as i64)..=(self.max_lag as i64)
    }
}

/// Sample cross-correlation `rho[k] = corr(y_t, x_{t-k})` for `|k| <= K`.
///
/// Sums run over the `n - |k|` overlapping points; the normalization uses
/// the full-series centered sums of squares, which keeps `|rho| <= 1`.
pub fn ccf(y: &[f64], x: &[f64], max_lag: usize) -> Result<CcfResult> {
    let n = y.len();
    if x.len() != n {
        return Err(Error::Argument(format!(
            "series lengths differ: {} vs {}",
            n,
            x.len()
        )));
    }
    if n <= 2 * max_lag {
        return Err(Error::Argument(format!(
            "need n > 2K, got n = {n}, K = {max_lag}"
        )));
    }
    if is_constant(y) || is_constant(x) {
        return Err(Error::Degenerate("constant series has no cross-correlation".into()));
    }
    let my = mean(y);
    let mx = mean(x);
    let sy: f64 = y.iter().map(|&v| (v - my) * (v - my)).sum();
    let sx: f64 = x.iter().map(|&v| (v - mx) * (v - mx)).sum();
    let denom = (sy * sx).sqrt();
    let k_max = max_lag as i64;
    let mut rho = Vec::with_capacity(2 * max_lag + 1);
    for k in -k_max..=k_max {
        let mut num = 0.0;
        if k >= 0 {
            let k = k as usize;
            for t in k..n {
                num += (y[t] - my) * (x[t - k] - mx);
            }
        } else {
            let k = (-k) as usize;
            for t in 0..n - k {
                num += (y[t] - my) * (x[t + k] - mx);
            }
        }
        rho.push(num / denom);
    }
    Ok(CcfResult { max_lag, rho, n, band: 2.0 / (n as f64).sqrt() })
}

/// The three qualitative cross-correlation shape properties.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CcfClassification {
    /// More squared-correlation mass at positive lags than negative lags.
    pub right_volatility_bias: bool,
    /// Mean of `rho[0..=7]` negative and at least 5 of those 8 negative.
    pub short_negative: bool,
    /// Some `rho[k] > 2/sqrt(n)` for `k` in `[8, K]`.
    pub long_positive: bool,
}

/// Classify a cross-correlation shape. Requires `K >= 8`.
pub fn classify_ccf(c: &CcfResult) -> Result<CcfClassification> {
    let k_max = c.max_lag as i64;
    if k_max < 8 {
        return Err(Error::Argument(format!(
            "classification needs max_lag >= 8, got {k_max}"
        )));
    }
    let right: f64 = (1..=k_max).map(|k| c.rho(k) * c.rho(k)).sum();
    let left: f64 = (1..=k_max).map(|k| c.rho(-k) * c.rho(-k)).sum();
    let right_volatility_bias = right > left;

    let short: Vec<f64> = (0..=7).map(|k| c.rho(k)).collect();
    let short_mean = short.iter().sum::<f64>() / short.len() as f64;
    let neg_count = short.iter().filter(|&&r| r < 0.0).count();
    let short_negative = short_mean < 0.0 && neg_count >= 5;

    let long_positive = (8..=k_max).any(|k| c.rho(k) > c.band);

    Ok(CcfClassification { right_volatility_bias, short_negative, long_positive })
}

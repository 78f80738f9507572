//! Univariate AR(1)+GARCH(1,1) estimation, two-stage DCC(1,1), conditional
//! covariance paths, grouped volatility and the parameter inference table.

mod dcc;
mod garch;
pub mod sim;

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

pub use dcc::{dcc_recursion, fit_dcc_correlation, sample_correlation, DccCorrelation};
pub use garch::{fit_ar1_garch11, garch_nll, mean_nll_unconstrained, GarchFit};

/// Standard errors from a numerical Hessian of a summed negative
/// log-likelihood: invert and read the diagonal.
///
/// Near a constraint boundary the finite-difference Hessian can lose
/// positive definiteness; the fallback inverts on absolute eigenvalues
/// (the usual flip-negative-curvature repair) so every parameter still
/// gets a reported error. Only an exactly singular direction yields `NaN`.
pub(crate) fn invert_for_se(hessian: &[Vec<f64>]) -> [f64; 5] {
    // Caller slices down to its own parameter count; unused tail stays NaN.
    let n = hessian.len();
    let mut se = [f64::NAN; 5];
    let mat = DMatrix::from_fn(n, n, |i, j| 0.5 * (hessian[i][j] + hessian[j][i]));
    let plain = mat.clone().try_inverse().filter(|inv| {
        (0..n).all(|i| inv[(i, i)].is_finite() && inv[(i, i)] > 0.0)
    });
    match plain {
        Some(inv) => {
            for (i, s) in se.iter_mut().enumerate().take(n) {
                *s = inv[(i, i)].sqrt();
            }
        }
        None => {
            let eig = nalgebra::SymmetricEigen::new(mat);
            for (i, s) in se.iter_mut().enumerate().take(n) {
                let mut acc = 0.0;
                for k in 0..n {
                    let lam = eig.eigenvalues[k].abs();
                    if lam > 1e-300 {
                        let v = eig.eigenvectors[(i, k)];
                        acc += v * v / lam;
                    } else {
                        acc = f64::NAN;
                        break;
                    }
                }
                if acc.is_finite() && acc > 0.0 {
                    *s = acc.sqrt();
                }
            }
        }
    }
    se
}

/// Joint two-stage DCC-GARCH estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct DccFit {
    /// Univariate fits, one per input series.
    pub fits: Vec<GarchFit>,
    /// Second-stage correlation dynamics.
    pub corr: DccCorrelation,
    /// Conditional covariance path `H_t = D_t R_t D_t`.
    pub h_path: Vec<DMatrix<f64>>,
}

/// Fit univariate AR(1)+GARCH(1,1) models per series, then the DCC(1,1)
/// correlation stage on their standardized residuals.
pub fn fit_dcc(series: &[Vec<f64>]) -> Result<DccFit> {
    if series.len() < 2 {
        return Err(Error::Argument(format!(
            "DCC needs at least 2 series, got {}",
            series.len()
        )));
    }
    let n = series[0].len();
    if series.iter().any(|s| s.len() != n) {
        return Err(Error::Argument("series have different lengths".into()));
    }
    let fits: Vec<GarchFit> =
        series.iter().map(|s| fit_ar1_garch11(s)).collect::<Result<_>>()?;
    let u: Vec<Vec<f64>> = fits.iter().map(|f| f.u.clone()).collect();
    let corr = fit_dcc_correlation(&u)?;
    let sigma2: Vec<&[f64]> = fits.iter().map(|f| f.sigma2.as_slice()).collect();
    let h_path = build_h_path(&sigma2, &corr.r_path);
    Ok(DccFit { fits, corr, h_path })
}

/// `H_t = D_t R_t D_t` with `D_t = diag(sigma_t)`.
pub fn build_h_path(sigma2: &[&[f64]], r_path: &[DMatrix<f64>]) -> Vec<DMatrix<f64>> {
    let m = sigma2.len();
    r_path
        .iter()
        .enumerate()
        .map(|(t, r)| {
            DMatrix::from_fn(m, m, |i, j| {
                r[(i, j)] * (sigma2[i][t] * sigma2[j][t]).sqrt()
            })
        })
        .collect()
}

/// The conditional covariance path of a fit.
pub fn dcc_covariance_series(fit: &DccFit) -> &[DMatrix<f64>] {
    &fit.h_path
}

/// Per-pair covariance series `(i, j, H_t[i][j])` for `i <= j`; the
/// diagonal entries are the per-series variance paths.
pub fn covariance_pairs(fit: &DccFit) -> Vec<(usize, usize, Vec<f64>)> {
    let m = fit.fits.len();
    let mut out = Vec::new();
    for i in 0..m {
        for j in i..m {
            let series = fit.h_path.iter().map(|h| h[(i, j)]).collect();
            out.push((i, j, series));
        }
    }
    out
}

/// Named groups of series indices for volatility aggregation.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GroupSpec {
    pub groups: BTreeMap<String, BTreeSet<usize>>,
}

/// Per-group volatility: `v_g(t) = Σ_{i,j in g} H_t[i][j]`.
pub fn group_volatility(
    h_path: &[DMatrix<f64>],
    spec: &GroupSpec,
) -> Result<BTreeMap<String, Vec<f64>>> {
    let m = h_path.first().map(|h| h.nrows()).unwrap_or(0);
    let mut out = BTreeMap::new();
    for (name, members) in &spec.groups {
        if members.is_empty() {
            return Err(Error::Argument(format!("group '{name}' is empty")));
        }
        if let Some(&bad) = members.iter().find(|&&i| i >= m) {
            return Err(Error::Argument(format!(
                "group '{name}' references series {bad}, but only {m} series exist"
            )));
        }
        let series = h_path
            .iter()
            .map(|h| {
                members
                    .iter()
                    .flat_map(|&i| members.iter().map(move |&j| h[(i, j)]))
                    .sum()
            })
            .collect();
        out.insert(name.clone(), series);
    }
    Ok(out)
}

/// One row of the inference table.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamRow {
    pub label: String,
    pub estimate: f64,
    pub std_error: f64,
    pub t_value: f64,
    pub p_value: f64,
    /// `boundary` when the estimate sits on a constraint boundary and the
    /// asymptotic-normal p-value should not be trusted; empty otherwise.
    pub note: String,
}

/// Parameter inference table: five univariate rows per series followed by
/// the two joint DCC rows.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamTable {
    rows: Vec<ParamRow>,
}

impl ParamTable {
    pub const COLUMNS: [&'static str; 4] = ["Estimate", "Std. Error", "t value", "Pr(>|t|)"];

    pub fn rows(&self) -> &[ParamRow] {
        &self.rows
    }

    pub fn to_csv(&self, out: &mut dyn Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let header: Vec<&str> = std::iter::once("parameter")
            .chain(Self::COLUMNS)
            .chain(std::iter::once("note"))
            .collect();
        w.write_record(&header).map_err(csv_err)?;
        for row in &self.rows {
            w.write_record([
                row.label.as_str(),
                &row.estimate.to_string(),
                &row.std_error.to_string(),
                &row.t_value.to_string(),
                &row.p_value.to_string(),
                &row.note,
            ])
            .map_err(csv_err)?;
        }
        w.flush().map_err(|e| Error::Validation(format!("writing parameter table: {e}")))?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.to_csv(&mut buf)?;
        String::from_utf8(buf).map_err(|e| Error::Validation(e.to_string()))
    }

    pub fn from_csv_str(s: &str) -> Result<ParamTable> {
        let mut reader = csv::Reader::from_reader(s.as_bytes());
        let mut rows = Vec::new();
        for record in reader.records() {
            let record = record.map_err(csv_err)?;
            if record.len() != 6 {
                return Err(Error::Validation(format!(
                    "parameter table row has {} fields, expected 6",
                    record.len()
                )));
            }
            let num = |i: usize| -> Result<f64> {
                record[i]
                    .parse()
                    .map_err(|e| Error::Validation(format!("bad number '{}': {e}", &record[i])))
            };
            rows.push(ParamRow {
                label: record[0].to_string(),
                estimate: num(1)?,
                std_error: num(2)?,
                t_value: num(3)?,
                p_value: num(4)?,
                note: record[5].to_string(),
            });
        }
        Ok(ParamTable { rows })
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Validation(format!("csv: {e}"))
}

fn garch_rows(name: &str, gf: &GarchFit) -> Vec<ParamRow> {
    let flags = gf.boundary_flags();
    GarchFit::PARAM_NAMES
        .iter()
        .enumerate()
        .map(|(i, param)| ParamRow {
            label: format!("[{name}].{param}"),
            estimate: gf.estimates()[i],
            std_error: gf.se[i],
            t_value: gf.tvalues[i],
            p_value: gf.pvalues[i],
            note: if flags[i] { "boundary".into() } else { String::new() },
        })
        .collect()
}

/// Inference table for a single univariate fit (five rows).
pub fn garch_param_table(fit: &GarchFit, name: &str) -> ParamTable {
    ParamTable { rows: garch_rows(name, fit) }
}

/// Build the inference table for a joint fit. `names` labels the series in
/// fit order; a 3-series fit yields 17 rows.
pub fn param_table(fit: &DccFit, names: &[String]) -> Result<ParamTable> {
    if names.len() != fit.fits.len() {
        return Err(Error::Argument(format!(
            "{} names for {} series",
            names.len(),
            fit.fits.len()
        )));
    }
    let mut rows = Vec::new();
    for (name, gf) in names.iter().zip(&fit.fits) {
        rows.extend(garch_rows(name, gf));
    }
    let joint_flags = fit.corr.boundary_flags();
    for (i, label) in ["[Joint]dcca1", "[Joint]dccb1"].iter().enumerate() {
        rows.push(ParamRow {
            label: (*label).into(),
            estimate: if i == 0 { fit.corr.alpha } else { fit.corr.beta },
            std_error: fit.corr.se[i],
            t_value: fit.corr.tvalues[i],
            p_value: fit.corr.pvalues[i],
            note: if joint_flags[i] { "boundary".into() } else { String::new() },
        });
    }
    Ok(ParamTable { rows })
}

//! Ordinary least squares with the classical (nonrobust) inferential summary.

use serde::Serialize;

use crate::distributions::{f_sf, t_quantile, t_two_sided_p, TailProbability};
use crate::error::{Error, Result};
use crate::features::EncodedDataset;
use crate::numcore::{least_squares_solve, unscaled_covariance};

pub const COVARIANCE_TYPE: &str = "nonrobust";
pub const DEFAULT_CONFIDENCE: f64 = 0.95;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitResult {
    pub column_names: Vec<String>,
    pub n_obs: usize,
    /// Estimated (retained) parameters, bias included.
    pub k_params: usize,
    pub df_model: usize,
    pub df_resid: usize,
    pub has_bias: bool,
    /// One entry per design column; dropped columns hold exactly 0.
    pub coefficients: Vec<f64>,
    pub std_errors: Vec<Option<f64>>,
    pub t_values: Vec<Option<f64>>,
    pub p_values: Vec<Option<TailProbability>>,
    pub confidence_level: f64,
    pub ci_low: Vec<Option<f64>>,
    pub ci_high: Vec<Option<f64>>,
    pub r_squared: f64,
    pub adj_r_squared: Option<f64>,
    pub f_statistic: Option<f64>,
    pub f_p_value: Option<TailProbability>,
    pub log_likelihood: Option<f64>,
    pub aic: Option<f64>,
    pub bic: Option<f64>,
    pub rss: f64,
    pub residuals: Vec<f64>,
    pub fitted: Vec<f64>,
    /// Indices of design columns removed as linearly dependent.
    pub dropped_columns: Vec<usize>,
    /// False when there are no residual degrees of freedom.
    pub inference_available: bool,
    pub covariance_type: &'static str,
}

impl FitResult {
    pub fn retained_columns(&self) -> Vec<usize> {
        (0..self.coefficients.len())
            .filter(|j| !self.dropped_columns.contains(j))
            .collect()
    }

    /// Largest p-value among retained columns with its column index; the
    /// lowest index wins ties.
    pub fn max_p_value(&self) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        for (j, p) in self.p_values.iter().enumerate() {
            if let Some(p) = p {
                if best.is_none_or(|(_, b)| p.value() > b) {
                    best = Some((j, p.value()));
                }
            }
        }
        best
    }
}

/// 1 − (1 − R²)(n − c)/df_resid with c = 1 when a bias column is fitted.
pub fn adjusted_r_squared(r_squared: f64, n_obs: usize, df_resid: usize, has_bias: bool) -> Option<f64> {
    if df_resid == 0 {
        return None;
    }
    let c = usize::from(has_bias);
    Some(1.0 - (1.0 - r_squared) * (n_obs - c) as f64 / df_resid as f64)
}

/// Overall F statistic from R²; `None` when either df is zero or the fit is exact.
pub fn f_statistic(r_squared: f64, df_model: usize, df_resid: usize) -> Option<f64> {
    if df_model == 0 || df_resid == 0 || r_squared >= 1.0 {
        return None;
    }
    Some((r_squared / df_model as f64) / ((1.0 - r_squared) / df_resid as f64))
}

/// Gaussian log-likelihood at the ML variance `rss / n`.
pub fn log_likelihood(rss: f64, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidInput("log-likelihood needs n >= 1".to_string()));
    }
    if !(rss > 0.0) || !rss.is_finite() {
        return Err(Error::DegenerateModel(format!(
            "log-likelihood is unbounded for rss = {rss}"
        )));
    }
    let n = n as f64;
    Ok(-(n / 2.0) * ((2.0 * std::f64::consts::PI).ln() + 1.0 + (rss / n).ln()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InformationCriteria {
    pub aic: f64,
    pub bic: f64,
}

pub fn information_criteria(log_likelihood: f64, k_params: usize, n: usize) -> InformationCriteria {
    let k = k_params as f64;
    InformationCriteria {
        aic: -2.0 * log_likelihood + 2.0 * k,
        bic: -2.0 * log_likelihood + k * (n as f64).ln(),
    }
}

/// One line of the coefficient table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoefficientRow {
    pub name: String,
    pub coef: f64,
    pub std_err: f64,
    /// `None` when the standard error is zero.
    pub t: Option<f64>,
    pub p: Option<TailProbability>,
    pub ci_low: f64,
    pub ci_high: f64,
}

/// t statistic, two-sided p-value and t-based interval for one coefficient.
pub fn coefficient_row(name: &str, coef: f64, std_err: f64, df_resid: usize, level: f64) -> Result<CoefficientRow> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::Domain(format!(
            "confidence level must lie in (0, 1), got {level}"
        )));
    }
    if !(std_err >= 0.0) {
        return Err(Error::InvalidInput(format!(
            "standard error must be non-negative, got {std_err}"
        )));
    }
    let q = t_quantile((1.0 + level) / 2.0, df_resid)?;
    let (t, p) = if std_err > 0.0 {
        let t = coef / std_err;
        (Some(t), Some(t_two_sided_p(t, df_resid)?))
    } else {
        (None, None)
    };
    Ok(CoefficientRow {
        name: name.to_string(),
        coef,
        std_err,
        t,
        p,
        ci_low: coef - q * std_err,
        ci_high: coef + q * std_err,
    })
}

pub fn fit_ols(data: &EncodedDataset) -> Result<FitResult> {
    fit_ols_with_level(data, DEFAULT_CONFIDENCE)
}

pub fn fit_ols_with_level(data: &EncodedDataset, level: f64) -> Result<FitResult> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::Domain(format!(
            "confidence level must lie in (0, 1), got {level}"
        )));
    }
    let y = &data.response;
    let n = y.len();
    if n == 0 {
        return Err(Error::InvalidInput("no observations".to_string()));
    }
    let ls = least_squares_solve(&data.design, y)?;
    let k = ls.rank;
    if k == 0 {
        return Err(Error::DegenerateModel(
            "every design column is numerically zero".to_string(),
        ));
    }
    let has_bias = data.has_bias() && !ls.dropped_columns.contains(&0);
    let df_model = k - usize::from(has_bias);
    let df_resid = n - k;

    let tss: f64 = if has_bias {
        let mean = y.iter().sum::<f64>() / n as f64;
        y.iter().map(|v| (v - mean) * (v - mean)).sum()
    } else {
        y.iter().map(|v| v * v).sum()
    };
    if !(tss > 0.0) {
        return Err(Error::DegenerateResponse(if has_bias {
            "response has zero variance".to_string()
        } else {
            "response is identically zero".to_string()
        }));
    }

    let fitted = data.design.mul_vec(&ls.coefficients)?;
    let residuals: Vec<f64> = y.iter().zip(&fitted).map(|(a, b)| a - b).collect();
    let rss = ls.rss;
    let r_squared = (1.0 - rss / tss).clamp(0.0, 1.0);

    // Below (ε‖y‖)² the residual is rounding noise and the fit is exact.
    let norm_y2: f64 = y.iter().map(|v| v * v).sum();
    let perfect_fit = rss <= f64::EPSILON * f64::EPSILON * norm_y2 * n as f64;

    let cols = data.design.cols();
    let mut std_errors = vec![None; cols];
    let mut t_values = vec![None; cols];
    let mut p_values = vec![None; cols];
    let mut ci_low = vec![None; cols];
    let mut ci_high = vec![None; cols];
    let inference_available = df_resid >= 1;
    if inference_available {
        let sigma2 = rss / df_resid as f64;
        let cov = unscaled_covariance(&ls.factors)?;
        let names = data.column_names();
        for (pos, &j) in ls.factors.retained_columns().iter().enumerate() {
            let se = (sigma2 * cov[(pos, pos)]).max(0.0).sqrt();
            let row = coefficient_row(&names[j], ls.coefficients[j], se, df_resid, level)?;
            std_errors[j] = Some(se);
            t_values[j] = row.t;
            p_values[j] = row.p;
            ci_low[j] = Some(row.ci_low);
            ci_high[j] = Some(row.ci_high);
        }
    }

    let (f_stat, f_p_value) = match f_statistic(r_squared, df_model, df_resid) {
        Some(f) if !perfect_fit => (Some(f), Some(f_sf(f, df_model, df_resid)?)),
        _ => (None, None),
    };
    let (log_lik, aic, bic) = if perfect_fit {
        (None, None, None)
    } else {
        let ll = log_likelihood(rss, n)?;
        let ic = information_criteria(ll, k, n);
        (Some(ll), Some(ic.aic), Some(ic.bic))
    };

    Ok(FitResult {
        column_names: data.column_names(),
        n_obs: n,
        k_params: k,
        df_model,
        df_resid,
        has_bias,
        coefficients: ls.coefficients,
        std_errors,
        t_values,
        p_values,
        confidence_level: level,
        ci_low,
        ci_high,
        r_squared,
        adj_r_squared: adjusted_r_squared(r_squared, n, df_resid, has_bias),
        f_statistic: f_stat,
        f_p_value,
        log_likelihood: log_lik,
        aic,
        bic,
        rss,
        residuals,
        fitted,
        dropped_columns: ls.dropped_columns,
        inference_available,
        covariance_type: COVARIANCE_TYPE,
    })
}

/// Coefficient table over retained columns at the requested confidence level.
pub fn coefficient_table(fit: &FitResult, level: f64) -> Result<Vec<CoefficientRow>> {
    if !fit.inference_available {
        return Err(Error::InferenceUnavailable(
            "the fit has no residual degrees of freedom".to_string(),
        ));
    }
    fit.retained_columns()
        .into_iter()
        .map(|j| {
            let se = fit.std_errors[j].ok_or_else(|| {
                Error::InferenceUnavailable(format!(
                    "no standard error for column {}",
                    fit.column_names[j]
                ))
            })?;
            coefficient_row(&fit.column_names[j], fit.coefficients[j], se, fit.df_resid, level)
        })
        .collect()
}

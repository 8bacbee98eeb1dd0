//! Residual diagnostics: Breusch–Pagan, variance inflation, MAPE and plot series.

use serde::Serialize;

use crate::distributions::{chi2_sf, TailProbability};
use crate::error::{Error, Result};
use crate::features::{ColumnKind, EncodedDataset};
use crate::numcore::{least_squares_solve, Matrix};
use crate::ols::FitResult;

/// Which form of the Breusch–Pagan statistic to compute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BpVariant {
    /// Studentized: n·R² of e² on the regressors.
    #[default]
    Koenker,
    /// Half the explained sum of squares of e²/σ̂²_ML on the regressors.
    Original,
}

impl std::str::FromStr for BpVariant {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "koenker" => Ok(BpVariant::Koenker),
            "original" => Ok(BpVariant::Original),
            other => Err(format!("unknown Breusch-Pagan variant {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BreuschPaganResult {
    pub lm_statistic: f64,
    pub df: usize,
    pub p_value: TailProbability,
    pub variant: BpVariant,
}

/// Breusch–Pagan test on a fitted model, using the fit's retained columns.
pub fn breusch_pagan(fit: &FitResult, data: &EncodedDataset, variant: BpVariant) -> Result<BreuschPaganResult> {
    if fit.n_obs != data.n_obs() || fit.coefficients.len() != data.design.cols() {
        return Err(Error::InvalidInput(
            "fit and dataset do not describe the same model".to_string(),
        ));
    }
    if fit.df_resid == 0 {
        return Err(Error::InferenceUnavailable(
            "Breusch-Pagan needs at least one residual degree of freedom".to_string(),
        ));
    }
    let design = data.design.select_columns(&fit.retained_columns());
    breusch_pagan_from_residuals(&fit.residuals, &design, fit.has_bias, variant)
}

/// Breusch–Pagan test from residuals and the regressors they came from.
///
/// The auxiliary regression always carries an intercept: a column of ones is
/// prepended when `has_bias` is false. Collinear auxiliary columns are
/// dropped and the degrees of freedom shrink accordingly.
pub fn breusch_pagan_from_residuals(
    residuals: &[f64],
    design: &Matrix,
    has_bias: bool,
    variant: BpVariant,
) -> Result<BreuschPaganResult> {
    let n = residuals.len();
    if n != design.rows() {
        return Err(Error::InvalidInput(format!(
            "{} residuals for a design with {} rows",
            n,
            design.rows()
        )));
    }
    let aux_design = if has_bias {
        design.clone()
    } else {
        design.with_leading_ones()
    };
    let squared: Vec<f64> = residuals.iter().map(|e| e * e).collect();
    let sigma2_ml = squared.iter().sum::<f64>() / n as f64;
    let target: Vec<f64> = match variant {
        BpVariant::Koenker => squared,
        BpVariant::Original if sigma2_ml > 0.0 => squared.iter().map(|v| v / sigma2_ml).collect(),
        BpVariant::Original => vec![0.0; n],
    };

    let aux = least_squares_solve(&aux_design, &target)?;
    if aux.rank < 2 {
        return Err(Error::InvalidInput(
            "Breusch-Pagan needs at least one regressor besides the intercept".to_string(),
        ));
    }
    let df = aux.rank - 1;
    let mean = target.iter().sum::<f64>() / n as f64;
    let tss: f64 = target.iter().map(|v| (v - mean) * (v - mean)).sum();
    // Constant squared residuals leave nothing to explain.
    let scale: f64 = target.iter().map(|v| v * v).sum();
    let lm = if tss <= 1e-24 * scale || tss == 0.0 {
        0.0
    } else {
        let ess = (tss - aux.rss).max(0.0);
        match variant {
            BpVariant::Koenker => n as f64 * ess / tss,
            BpVariant::Original => ess / 2.0,
        }
    };
    Ok(BreuschPaganResult {
        lm_statistic: lm,
        df,
        p_value: chi2_sf(lm, df)?,
        variant,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum VifBand {
    Uncorrelated,
    Moderate,
    High,
}

/// Comparison slack for the band edges, so R² = 0.8 lands on VIF = 5 exactly.
const BAND_SLACK: f64 = 1e-9;
/// 1 − R² below this is treated as exact collinearity.
const COLLINEAR_TOL: f64 = 1e-10;

impl VifBand {
    pub fn of(vif: f64) -> Self {
        if vif <= 1.0 + BAND_SLACK {
            VifBand::Uncorrelated
        } else if vif <= 5.0 + BAND_SLACK {
            VifBand::Moderate
        } else {
            VifBand::High
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VifEntry {
    pub column: String,
    pub r_squared_aux: f64,
    /// `None` when the column is an exact linear combination of the others.
    pub vif: Option<f64>,
    pub infinite: bool,
    pub band: VifBand,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VifReport {
    pub entries: Vec<VifEntry>,
}

impl VifReport {
    pub fn get(&self, column: &str) -> Option<&VifEntry> {
        self.entries.iter().find(|e| e.column == column)
    }
}

/// Variance inflation factor of every non-bias column against all the
/// others plus an intercept.
pub fn vif(data: &EncodedDataset) -> Result<VifReport> {
    let regressors: Vec<usize> = data
        .columns
        .iter()
        .enumerate()
        .filter(|(_, c)| c.kind != ColumnKind::Bias)
        .map(|(j, _)| j)
        .collect();
    if regressors.len() < 2 {
        return Err(Error::InvalidInput(format!(
            "VIF needs at least 2 non-bias columns, got {}",
            regressors.len()
        )));
    }
    let n = data.n_obs();
    let mut entries = Vec::with_capacity(regressors.len());
    for &j in &regressors {
        let others: Vec<usize> = regressors.iter().copied().filter(|&k| k != j).collect();
        let x = data.design.select_columns(&others).with_leading_ones();
        let target = data.design.column(j);
        let mean = target.iter().sum::<f64>() / n as f64;
        let tss: f64 = target.iter().map(|v| (v - mean) * (v - mean)).sum();
        let r2 = if tss <= 0.0 {
            // A constant column is a multiple of the intercept.
            1.0
        } else {
            let fit = least_squares_solve(&x, &target)?;
            (1.0 - fit.rss / tss).clamp(0.0, 1.0)
        };
        let infinite = 1.0 - r2 < COLLINEAR_TOL;
        let (vif, band) = if infinite {
            (None, VifBand::High)
        } else {
            let v = 1.0 / (1.0 - r2);
            (Some(v), VifBand::of(v))
        };
        entries.push(VifEntry {
            column: data.columns[j].name.clone(),
            r_squared_aux: r2,
            vif,
            infinite,
            band,
        });
    }
    Ok(VifReport { entries })
}

/// Mean absolute percentage error, in percent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(transparent)]
pub struct MapeValue(pub f64);

pub fn mape(actual: &[f64], predicted: &[f64]) -> Result<MapeValue> {
    if actual.len() != predicted.len() {
        return Err(Error::InvalidInput(format!(
            "{} actual values but {} predictions",
            actual.len(),
            predicted.len()
        )));
    }
    if actual.is_empty() {
        return Err(Error::InvalidInput("MAPE needs at least one value".to_string()));
    }
    if let Some(index) = actual.iter().position(|&a| a == 0.0) {
        return Err(Error::ZeroActual { index });
    }
    let total: f64 = actual
        .iter()
        .zip(predicted)
        .map(|(a, p)| ((a - p) / a).abs())
        .sum();
    Ok(MapeValue(100.0 * total / actual.len() as f64))
}

/// Data behind the residual and measured/predicted plots.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlotSeries {
    /// (fitted, residual)
    pub residual_series: Vec<(f64, f64)>,
    /// (actual, fitted)
    pub measured_predicted: Vec<(f64, f64)>,
}

pub fn plot_series(fit: &FitResult) -> PlotSeries {
    let residual_series = fit
        .fitted
        .iter()
        .zip(&fit.residuals)
        .map(|(&f, &r)| (f, r))
        .collect();
    let measured_predicted = fit
        .fitted
        .iter()
        .zip(&fit.residuals)
        .map(|(&f, &r)| (f + r, f))
        .collect();
    PlotSeries {
        residual_series,
        measured_predicted,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ols::fit_ols;

    #[test]
    fn hand_worked_koenker() {
        let x = Matrix::from_rows(&[[1.0, 1.0], [1.0, 2.0], [1.0, 3.0], [1.0, 4.0]]).unwrap();
        let bp = breusch_pagan_from_residuals(&[1.0, -1.0, 2.0, -2.0], &x, true, BpVariant::Koenker)
            .unwrap();
        assert!((bp.lm_statistic - 3.2).abs() < 1e-12);
        assert_eq!(bp.df, 1);
        assert!((bp.p_value.value() - 0.073_638_270_120_302_58).abs() < 1e-9);
    }

    #[test]
    fn constant_squared_residuals() {
        let x = Matrix::from_rows(&[[1.0, 1.0], [1.0, 2.0], [1.0, 3.0], [1.0, 4.0]]).unwrap();
        for variant in [BpVariant::Koenker, BpVariant::Original] {
            let bp = breusch_pagan_from_residuals(&[1.0, -1.0, 1.0, -1.0], &x, true, variant).unwrap();
            assert_eq!(bp.lm_statistic, 0.0);
            assert_eq!(bp.p_value.value(), 1.0);
        }
    }

    #[test]
    fn intercept_is_added_when_missing() {
        let with = Matrix::from_rows(&[[1.0, 1.0], [1.0, 2.0], [1.0, 3.0], [1.0, 4.0]]).unwrap();
        let without = Matrix::from_rows(&[[1.0], [2.0], [3.0], [4.0]]).unwrap();
        let e = [1.0, -1.0, 2.0, -2.0];
        let a = breusch_pagan_from_residuals(&e, &with, true, BpVariant::Koenker).unwrap();
        let b = breusch_pagan_from_residuals(&e, &without, false, BpVariant::Koenker).unwrap();
        assert!((a.lm_statistic - b.lm_statistic).abs() < 1e-12);
    }

    #[test]
    fn original_variant_hand_value() {
        // e² = [1,1,4,4], σ̂² = 2.5, g = e²/2.5; ESS(g) = 0.8·TSS(g) = 0.8·9/6.25.
        let x = Matrix::from_rows(&[[1.0, 1.0], [1.0, 2.0], [1.0, 3.0], [1.0, 4.0]]).unwrap();
        let bp = breusch_pagan_from_residuals(&[1.0, -1.0, 2.0, -2.0], &x, true, BpVariant::Original)
            .unwrap();
        assert!((bp.lm_statistic - 0.8 * 9.0 / 6.25 / 2.0).abs() < 1e-12);
    }

    #[test]
    fn vif_orthogonal_columns() {
        let data = EncodedDataset::from_regressors(
            &[
                ("a", vec![1.0, -1.0, 1.0, -1.0]),
                ("b", vec![1.0, 1.0, -1.0, -1.0]),
            ],
            vec![1.0, 2.0, 3.0, 5.0],
            true,
        )
        .unwrap();
        let report = vif(&data).unwrap();
        for e in &report.entries {
            assert!((e.vif.unwrap() - 1.0).abs() < 1e-12);
            assert_eq!(e.band, VifBand::Uncorrelated);
        }
    }

    #[test]
    fn vif_duplicate_columns_are_infinite() {
        let a = vec![1.0, 2.0, 4.0, 3.0, 7.0];
        let data = EncodedDataset::from_regressors(
            &[("a", a.clone()), ("b", vec![0.0, 1.0, 0.0, 1.0, 1.0]), ("a_copy", a)],
            vec![1.0, 2.0, 3.0, 5.0, 4.0],
            true,
        )
        .unwrap();
        let report = vif(&data).unwrap();
        assert!(report.get("a").unwrap().infinite);
        assert!(report.get("a_copy").unwrap().infinite);
        assert!(!report.get("b").unwrap().infinite);
        assert_eq!(report.get("a").unwrap().band, VifBand::High);
    }

    #[test]
    fn vif_band_edges() {
        assert_eq!(VifBand::of(1.0 / (1.0 - 0.8)), VifBand::Moderate);
        assert_eq!(VifBand::of(5.01), VifBand::High);
        assert_eq!(VifBand::of(1.0), VifBand::Uncorrelated);
        assert_eq!(VifBand::of(1.5), VifBand::Moderate);
    }

    #[test]
    fn vif_needs_two_regressors() {
        let data =
            EncodedDataset::from_regressors(&[("a", vec![1.0, 2.0, 3.0])], vec![1.0, 2.0, 4.0], true)
                .unwrap();
        assert!(matches!(vif(&data), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn mape_examples() {
        assert_eq!(mape(&[3.0, 4.0], &[3.0, 4.0]).unwrap().0, 0.0);
        assert!((mape(&[100.0, 200.0], &[90.0, 220.0]).unwrap().0 - 10.0).abs() < 1e-12);
        assert!((mape(&[50.0], &[75.0]).unwrap().0 - 50.0).abs() < 1e-12);
        assert!(matches!(
            mape(&[1.0, 0.0], &[1.0, 1.0]),
            Err(Error::ZeroActual { index: 1 })
        ));
        assert!(mape(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn plot_series_of_hand_fit() {
        let data =
            EncodedDataset::from_regressors(&[("x", vec![0.0, 1.0, 2.0])], vec![0.0, 1.0, 1.0], true)
                .unwrap();
        let fit = fit_ols(&data).unwrap();
        let s = plot_series(&fit);
        let expect = [-1.0 / 6.0, 1.0 / 3.0, -1.0 / 6.0];
        for ((_, r), e) in s.residual_series.iter().zip(expect) {
            assert!((r - e).abs() < 1e-14);
        }
        for ((a, p), y) in s.measured_predicted.iter().zip(&data.response) {
            assert!((a - y).abs() < 1e-14);
            assert!(p.is_finite());
        }
    }
}

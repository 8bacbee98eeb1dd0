//! Backward elimination by p-value.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::features::EncodedDataset;
use crate::ols::{fit_ols_with_level, FitResult, DEFAULT_CONFIDENCE};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelSummary {
    pub k_params: usize,
    pub r_squared: f64,
    pub adj_r_squared: Option<f64>,
}

impl ModelSummary {
    fn of(fit: &FitResult) -> Self {
        Self {
            k_params: fit.k_params,
            r_squared: fit.r_squared,
            adj_r_squared: fit.adj_r_squared,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EliminationStep {
    pub removed_column: String,
    pub removed_p_value: f64,
    pub model_after: ModelSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EliminationTrace {
    pub alpha: f64,
    /// Columns removed up front because they were linearly dependent.
    pub rank_dropped: Vec<String>,
    pub initial_model: ModelSummary,
    pub steps: Vec<EliminationStep>,
    /// Indices into the input dataset of the columns that survived.
    pub retained_indices: Vec<usize>,
    pub retained_columns: Vec<String>,
    /// Set when a single column remains and its p-value still exceeds alpha.
    pub no_conforming_model: bool,
    #[serde(skip)]
    pub final_fit: FitResult,
}

impl EliminationTrace {
    /// The input dataset restricted to the surviving columns.
    pub fn final_dataset(&self, data: &EncodedDataset) -> EncodedDataset {
        data.select_columns(&self.retained_indices)
    }
}

pub fn backward_eliminate(data: &EncodedDataset, alpha: f64) -> Result<EliminationTrace> {
    backward_eliminate_with_level(data, alpha, DEFAULT_CONFIDENCE)
}

/// Repeatedly refits and removes the column with the largest p-value while
/// that p-value exceeds `alpha`. The bias column competes like any other;
/// ties go to the lowest column index and the last column is never removed.
pub fn backward_eliminate_with_level(data: &EncodedDataset, alpha: f64, level: f64) -> Result<EliminationTrace> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain(format!(
            "significance level must lie in (0, 1), got {alpha}"
        )));
    }
    let initial = fit_ols_with_level(data, level)?;
    let mut active: Vec<usize> = initial.retained_columns();
    let rank_dropped = initial
        .dropped_columns
        .iter()
        .map(|&j| data.columns[j].name.clone())
        .collect();
    let mut fit = if initial.dropped_columns.is_empty() {
        initial
    } else {
        fit_ols_with_level(&data.select_columns(&active), level)?
    };
    if !fit.inference_available {
        return Err(Error::InferenceUnavailable(format!(
            "{} observations leave no residual degrees of freedom for {} columns",
            fit.n_obs, fit.k_params
        )));
    }
    let initial_model = ModelSummary::of(&fit);

    let mut steps = Vec::new();
    let mut no_conforming_model = false;
    loop {
        let Some((pos, p)) = fit.max_p_value() else {
            return Err(Error::InferenceUnavailable(
                "no p-values are available for the current model".to_string(),
            ));
        };
        if p <= alpha {
            break;
        }
        if active.len() == 1 {
            no_conforming_model = true;
            break;
        }
        let removed = active.remove(pos);
        fit = fit_ols_with_level(&data.select_columns(&active), level)?;
        steps.push(EliminationStep {
            removed_column: data.columns[removed].name.clone(),
            removed_p_value: p,
            model_after: ModelSummary::of(&fit),
        });
    }

    Ok(EliminationTrace {
        alpha,
        rank_dropped,
        initial_model,
        steps,
        retained_columns: active.iter().map(|&j| data.columns[j].name.clone()).collect(),
        retained_indices: active,
        no_conforming_model,
        final_fit: fit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn data_with_noise() -> EncodedDataset {
        // y depends on x1 only; x2 is unrelated.
        let x1: Vec<f64> = (0..20).map(|i| i as f64).collect();
        let x2: Vec<f64> = (0..20).map(|i| ((i * 7) % 5) as f64 - 2.0).collect();
        let y: Vec<f64> = x1
            .iter()
            .enumerate()
            .map(|(i, v)| 3.0 * v + if i % 2 == 0 { 0.5 } else { -0.5 })
            .collect();
        EncodedDataset::from_regressors(&[("x1", x1), ("x2", x2)], y, true).unwrap()
    }

    #[test]
    fn vacuous_threshold_takes_no_steps() {
        let data = data_with_noise();
        let trace = backward_eliminate(&data, 0.999_999).unwrap();
        assert!(trace.steps.is_empty());
        assert_eq!(trace.retained_indices, vec![0, 1, 2]);
    }

    #[test]
    fn final_model_conforms() {
        let data = data_with_noise();
        let trace = backward_eliminate(&data, 0.05).unwrap();
        assert!(trace.retained_columns.contains(&"x1".to_string()));
        let (_, p) = trace.final_fit.max_p_value().unwrap();
        assert!(p <= 0.05 || trace.no_conforming_model);
        for step in &trace.steps {
            assert!(step.removed_p_value > 0.05);
        }
    }

    #[test]
    fn rejects_bad_alpha() {
        let data = data_with_noise();
        assert!(backward_eliminate(&data, 0.0).is_err());
        assert!(backward_eliminate(&data, 1.0).is_err());
    }

    #[test]
    fn single_unhelpful_column_is_flagged() {
        let data = EncodedDataset::from_regressors(
            &[("x", vec![1.0, -1.0, 1.0, -1.0, 0.5, -0.5])],
            vec![1.0, 1.2, 0.9, 1.1, -1.0, 1.05],
            false,
        )
        .unwrap();
        let trace = backward_eliminate(&data, 0.05).unwrap();
        assert!(trace.no_conforming_model);
        assert_eq!(trace.retained_columns, vec!["x"]);
    }

    #[test]
    fn collinear_columns_are_dropped_before_elimination() {
        let mut data = data_with_noise();
        let x1 = data.design.column(1);
        let mut cols: Vec<(&str, Vec<f64>)> = vec![("x1", x1.clone()), ("x2", data.design.column(2))];
        cols.push(("x1_again", x1));
        data = EncodedDataset::from_regressors(&cols, data.response.clone(), true).unwrap();
        let trace = backward_eliminate(&data, 0.999_999).unwrap();
        assert_eq!(trace.rank_dropped.len(), 1);
        assert_eq!(trace.retained_indices.len(), 3);
    }
}

//! Plain-text regression summary in the familiar OLS table layout.

use std::fmt::Write as _;

use mvreg_core::ols::{coefficient_table, FitResult};
use mvreg_core::Result;

const WIDTH: usize = 78;

/// `%#.{sig}g` formatting: `sig` significant digits, trailing zeros kept,
/// exponent form outside 1e-4..1e{sig}.
pub fn format_sig(x: f64, sig: usize) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let sig = sig.max(1);
    let sci = format!("{:.*e}", sig - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= sig as i32 {
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{mantissa}e{sign}{:02}", exp.abs());
    }
    let decimals = (sig as i32 - 1 - exp) as usize;
    if decimals == 0 {
        format!("{x:.0}.")
    } else {
        format!("{x:.decimals$}")
    }
}

fn opt(x: Option<f64>, f: impl Fn(f64) -> String) -> String {
    x.map(f).unwrap_or_else(|| "nan".to_string())
}

fn pair(out: &mut String, left: (&str, String), right: (&str, String)) {
    let half = WIDTH / 2;
    let l = format!("{:<w$}{:>v$}", left.0, left.1, w = 20, v = half - 20 - 1);
    let r = format!("{:<w$}{:>v$}", right.0, right.1, w = 20, v = WIDTH - half - 22);
    let _ = writeln!(out, "{l}   {r}");
}

/// Confidence bound labels, e.g. `[0.025` and `0.975]` at the 95% level.
pub fn interval_labels(level: f64) -> (String, String) {
    let tail = (1.0 - level) / 2.0;
    (format!("[{tail:.3}"), format!("{:.3}]", 1.0 - tail))
}

/// Renders the full summary: header block, coefficient table and notes.
pub fn render_summary(fit: &FitResult) -> Result<String> {
    let level = fit.confidence_level;
    let rows = coefficient_table(fit, level)?;
    let name_w = rows.iter().map(|r| r.name.len()).max().unwrap_or(0).max(10);
    let rule = WIDTH.max(name_w + 68);
    let mut out = String::new();
    let _ = writeln!(out, "{:^rule$}", "OLS Regression Results");
    let _ = writeln!(out, "{}", "=".repeat(rule));
    let f_p = fit.f_p_value.map(|p| p.value());
    pair(&mut out, ("Dep. Variable:", "y".into()), ("R-squared:", format!("{:.3}", fit.r_squared)));
    pair(
        &mut out,
        ("Model:", "OLS".into()),
        ("Adj. R-squared:", opt(fit.adj_r_squared, |v| format!("{v:.3}"))),
    );
    pair(
        &mut out,
        ("Method:", "Least Squares".into()),
        ("F-statistic:", opt(fit.f_statistic, |v| format_sig(v, 4))),
    );
    pair(
        &mut out,
        ("No. Observations:", fit.n_obs.to_string()),
        ("Prob (F-statistic):", opt(f_p, |v| format_sig(v, 3))),
    );
    pair(
        &mut out,
        ("Df Residuals:", fit.df_resid.to_string()),
        ("Log-Likelihood:", opt(fit.log_likelihood, |v| format_sig(v, 5))),
    );
    pair(
        &mut out,
        ("Df Model:", fit.df_model.to_string()),
        ("AIC:", opt(fit.aic, |v| format_sig(v, 4))),
    );
    pair(
        &mut out,
        ("Covariance Type:", fit.covariance_type.into()),
        ("BIC:", opt(fit.bic, |v| format_sig(v, 4))),
    );
    let _ = writeln!(out, "{}", "=".repeat(rule));

    let (lo, hi) = interval_labels(level);
    let _ = writeln!(
        out,
        "{:<name_w$} {:>11} {:>11} {:>9} {:>9} {:>11} {:>11}",
        "", "coef", "std err", "t", "P>|t|", lo, hi
    );
    let _ = writeln!(out, "{}", "-".repeat(rule));
    for r in &rows {
        let _ = writeln!(
            out,
            "{:<name_w$} {:>11.4} {:>11.4} {:>9} {:>9} {:>11.4} {:>11.4}",
            r.name,
            r.coef,
            r.std_err,
            opt(r.t, |v| format!("{v:.3}")),
            r.p.map(|p| p.to_string()).unwrap_or_else(|| "nan".into()),
            r.ci_low,
            r.ci_high,
        );
    }
    let _ = writeln!(out, "{}", "=".repeat(rule));

    let mut notes = Vec::new();
    if !fit.dropped_columns.is_empty() {
        let names: Vec<&str> = fit
            .dropped_columns
            .iter()
            .map(|&j| fit.column_names[j].as_str())
            .collect();
        notes.push(format!(
            "Linearly dependent columns omitted (coefficient fixed at 0): {}",
            names.join(", ")
        ));
    }
    if fit.log_likelihood.is_none() {
        notes.push("The model fits the response exactly; likelihood-based statistics are undefined.".into());
    }
    if !fit.inference_available {
        notes.push("No residual degrees of freedom; standard errors are unavailable.".into());
    }
    if !notes.is_empty() {
        let _ = writeln!(out, "Notes:");
        for (i, n) in notes.iter().enumerate() {
            let _ = writeln!(out, "[{}] {n}", i + 1);
        }
    }
    Ok(out)
}

//! Reference computations for the mvreg test suites.
//!
//! Everything here is written against textbook definitions and shares no
//! code with `mvreg-core`: normal equations with Gauss-Jordan inversion
//! instead of pivoted QR, classical Gram-Schmidt instead of Householder,
//! adaptive Simpson quadrature instead of continued fractions.

use std::f64::consts::PI;

/// Adaptive Simpson quadrature of `f` over `[a, b]` to absolute tolerance `tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    // Split into panels first so narrow peaks are not skipped by the first estimate.
    let panels = 64;
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|i| {
            let lo = a + h * i as f64;
            let hi = if i + 1 == panels { b } else { lo + h };
            let flo = f(lo);
            let fhi = f(hi);
            let mid = 0.5 * (lo + hi);
            let fmid = f(mid);
            let whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
            simpson_step(&f, lo, hi, flo, fmid, fhi, whole, tol / panels as f64, 40)
        })
        .sum()
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    // Past a few ulps of the panel value, further splitting only chases rounding.
    let floor = 64.0 * f64::EPSILON * (left.abs() + right.abs());
    if depth == 0 || delta.abs() <= (15.0 * tol).max(floor) {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
}

/// Γ(x) for positive integer or half-integer `x`, by the product recurrence.
pub fn gamma_half_integer(x: f64) -> f64 {
    let twice = (2.0 * x).round();
    assert!(
        (2.0 * x - twice).abs() < 1e-12 && x > 0.0,
        "gamma_half_integer needs a positive multiple of 1/2, got {x}"
    );
    let (mut acc, mut z) = if twice as i64 % 2 == 0 {
        (1.0, 1.0)
    } else {
        (PI.sqrt(), 0.5)
    };
    while z + 0.5 < x {
        acc *= z;
        z += 1.0;
    }
    acc
}

/// ln Γ(x) by upward recurrence to x ≥ 30 followed by the Stirling series.
pub fn ln_gamma_stirling(x: f64) -> f64 {
    assert!(x > 0.0);
    let mut shift = 0.0;
    let mut z = x;
    while z < 30.0 {
        shift += z.ln();
        z += 1.0;
    }
    let z2 = z * z;
    let series = 1.0 / (12.0 * z) - 1.0 / (360.0 * z * z2) + 1.0 / (1260.0 * z * z2 * z2)
        - 1.0 / (1680.0 * z * z2 * z2 * z2);
    (z - 0.5) * z.ln() - z + 0.5 * (2.0 * PI).ln() + series - shift
}

/// Student-t density with `df` degrees of freedom.
pub fn t_density(t: f64, df: u32) -> f64 {
    let nu = df as f64;
    let c = gamma_half_integer((nu + 1.0) / 2.0) / ((nu * PI).sqrt() * gamma_half_integer(nu / 2.0));
    c * (1.0 + t * t / nu).powf(-(nu + 1.0) / 2.0)
}

/// Two-sided Student-t tail probability by quadrature of the density.
pub fn t_two_sided_quadrature(t: f64, df: u32) -> f64 {
    let half = integrate(|s| t_density(s, df), 0.0, t.abs(), 1e-14);
    1.0 - 2.0 * half
}

/// F(d1, d2) density.
pub fn f_density(x: f64, d1: u32, d2: u32) -> f64 {
    if x <= 0.0 {
        return if d1 == 2 { 1.0 } else { 0.0 };
    }
    let (a, b) = (d1 as f64, d2 as f64);
    let beta = gamma_half_integer(a / 2.0) * gamma_half_integer(b / 2.0)
        / gamma_half_integer((a + b) / 2.0);
    (a / b).powf(a / 2.0) * x.powf(a / 2.0 - 1.0) * (1.0 + a * x / b).powf(-(a + b) / 2.0) / beta
}

/// Upper F tail by quadrature; requires `d1 >= 2` so the density is bounded at zero.
pub fn f_sf_quadrature(x: f64, d1: u32, d2: u32) -> f64 {
    assert!(d1 >= 2);
    1.0 - integrate(|s| f_density(s, d1, d2), 0.0, x, 1e-14)
}

/// Chi-square density.
pub fn chi2_density(x: f64, df: u32) -> f64 {
    if x <= 0.0 {
        return if df == 2 { 0.5 } else { 0.0 };
    }
    let k = df as f64;
    x.powf(k / 2.0 - 1.0) * (-x / 2.0).exp() / (2f64.powf(k / 2.0) * gamma_half_integer(k / 2.0))
}

/// Upper chi-square tail by quadrature; `df == 1` goes through the normal density.
pub fn chi2_sf_quadrature(x: f64, df: u32) -> f64 {
    if df == 1 {
        let phi = |z: f64| (-z * z / 2.0).exp() / (2.0 * PI).sqrt();
        return 1.0 - 2.0 * integrate(phi, 0.0, x.sqrt(), 1e-14);
    }
    1.0 - integrate(|s| chi2_density(s, df), 0.0, x, 1e-14)
}

/// Lower regularized incomplete gamma by quadrature, for `s >= 1`.
pub fn inc_gamma_lower_quadrature(s: f64, x: f64) -> f64 {
    assert!(s >= 1.0);
    let norm = ln_gamma_stirling(s).exp();
    integrate(|t| t.powf(s - 1.0) * (-t).exp(), 0.0, x, 1e-14) / norm
}

/// Regularized incomplete beta by quadrature, for `a, b >= 1`.
pub fn inc_beta_quadrature(a: f64, b: f64, x: f64) -> f64 {
    assert!(a >= 1.0 && b >= 1.0);
    let ln_beta = ln_gamma_stirling(a) + ln_gamma_stirling(b) - ln_gamma_stirling(a + b);
    let norm = ln_beta.exp();
    integrate(|t| t.powf(a - 1.0) * (1.0 - t).powf(b - 1.0), 0.0, x, 1e-14) / norm
}

/// Dense matrix as a vector of rows.
pub type Rows = Vec<Vec<f64>>;

pub fn transpose(a: &Rows) -> Rows {
    if a.is_empty() {
        return Vec::new();
    }
    (0..a[0].len())
        .map(|j| a.iter().map(|row| row[j]).collect())
        .collect()
}

pub fn matmul(a: &Rows, b: &Rows) -> Rows {
    let inner = b.len();
    let cols = if inner == 0 { 0 } else { b[0].len() };
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).map(|k| row[k] * b[k][j]).sum())
                .collect()
        })
        .collect()
}

pub fn matvec(a: &Rows, v: &[f64]) -> Vec<f64> {
    a.iter()
        .map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum())
        .collect()
}

/// Gauss-Jordan inverse with partial pivoting. Panics on a singular input.
pub fn invert(a: &Rows) -> Rows {
    let n = a.len();
    let mut aug: Rows = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| aug[i][col].abs().total_cmp(&aug[j][col].abs()))
            .unwrap();
        assert!(aug[pivot][col].abs() > 1e-300, "singular matrix");
        aug.swap(col, pivot);
        let p = aug[col][col];
        for v in aug[col].iter_mut() {
            *v /= p;
        }
        for r in 0..n {
            if r != col {
                let factor = aug[r][col];
                if factor != 0.0 {
                    for c in 0..2 * n {
                        aug[r][c] -= factor * aug[col][c];
                    }
                }
            }
        }
    }
    aug.into_iter().map(|row| row[n..].to_vec()).collect()
}

/// Classical Gram-Schmidt with one re-orthogonalisation pass: returns thin Q
/// (as rows) and square upper-triangular R.
pub fn gram_schmidt(a: &Rows) -> (Rows, Rows) {
    let m = a.len();
    let n = a[0].len();
    let cols = transpose(a);
    let mut q_cols: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut r = vec![vec![0.0; n]; n];
    for j in 0..n {
        let mut v = cols[j].clone();
        for _pass in 0..2 {
            for (i, q) in q_cols.iter().enumerate() {
                let proj: f64 = q.iter().zip(&v).map(|(x, y)| x * y).sum();
                r[i][j] += proj;
                for k in 0..m {
                    v[k] -= proj * q[k];
                }
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        r[j][j] = norm;
        q_cols.push(v.iter().map(|x| x / norm).collect());
    }
    (transpose(&q_cols), r)
}

/// Ordinary least squares via the normal equations and an explicit inverse.
#[derive(Debug, Clone)]
pub struct NormalEquationsFit {
    pub beta: Vec<f64>,
    pub xtx_inv: Rows,
    pub rss: f64,
    pub std_errors: Vec<f64>,
    pub r_squared: f64,
    pub adj_r_squared: f64,
    pub f_statistic: f64,
    pub log_likelihood: f64,
    pub aic: f64,
    pub bic: f64,
}

/// Fit `y ~ x` where the first column of `x` is a constant when `has_bias`.
pub fn normal_equations_ols(x: &Rows, y: &[f64], has_bias: bool) -> NormalEquationsFit {
    let n = x.len();
    let k = x[0].len();
    let xt = transpose(x);
    let xtx = matmul(&xt, x);
    let xtx_inv = invert(&xtx);
    let xty = matvec(&xt, y);
    let beta = matvec(&xtx_inv, &xty);
    let fitted = matvec(x, &beta);
    let rss: f64 = y.iter().zip(&fitted).map(|(a, b)| (a - b) * (a - b)).sum();
    let df_resid = (n - k) as f64;
    let sigma2 = rss / df_resid;
    let std_errors = (0..k).map(|j| (sigma2 * xtx_inv[j][j]).sqrt()).collect();
    let tss: f64 = if has_bias {
        let mean = y.iter().sum::<f64>() / n as f64;
        y.iter().map(|v| (v - mean) * (v - mean)).sum()
    } else {
        y.iter().map(|v| v * v).sum()
    };
    let r_squared = 1.0 - rss / tss;
    let c = if has_bias { 1.0 } else { 0.0 };
    let df_model = k as f64 - c;
    let adj_r_squared = 1.0 - (1.0 - r_squared) * (n as f64 - c) / df_resid;
    let f_statistic = (r_squared / df_model) / ((1.0 - r_squared) / df_resid);
    let sigma2_ml = rss / n as f64;
    let log_likelihood = gaussian_log_density_sum(
        &y.iter().zip(&fitted).map(|(a, b)| a - b).collect::<Vec<_>>(),
        sigma2_ml,
    );
    let aic = -2.0 * log_likelihood + 2.0 * k as f64;
    let bic = -2.0 * log_likelihood + k as f64 * (n as f64).ln();
    NormalEquationsFit {
        beta,
        xtx_inv,
        rss,
        std_errors,
        r_squared,
        adj_r_squared,
        f_statistic,
        log_likelihood,
        aic,
        bic,
    }
}

/// Σ ln N(eᵢ; 0, σ²), evaluated density by density.
pub fn gaussian_log_density_sum(residuals: &[f64], sigma2: f64) -> f64 {
    residuals
        .iter()
        .map(|e| ((-e * e / (2.0 * sigma2)).exp() / (2.0 * PI * sigma2).sqrt()).ln())
        .sum()
}

/// Frobenius norm of `a - b`.
pub fn frobenius_diff(a: &Rows, b: &Rows) -> f64 {
    a.iter()
        .zip(b)
        .flat_map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| (x - y) * (x - y)))
        .sum::<f64>()
        .sqrt()
}

pub fn frobenius(a: &Rows) -> f64 {
    a.iter().flatten().map(|x| x * x).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadrature_integrates_polynomial() {
        let v = integrate(|x| x * x, 0.0, 3.0, 1e-12);
        assert!((v - 9.0).abs() < 1e-10);
    }

    #[test]
    fn gamma_products() {
        assert!((gamma_half_integer(5.0) - 24.0).abs() < 1e-12);
        assert!((gamma_half_integer(1.5) - PI.sqrt() / 2.0).abs() < 1e-14);
        assert!((ln_gamma_stirling(5.0) - 24f64.ln()).abs() < 1e-12);
        assert!((ln_gamma_stirling(0.5) - 0.5 * PI.ln()).abs() < 1e-12);
    }

    #[test]
    fn inverse_of_known_matrix() {
        let a = vec![vec![4.0, 7.0], vec![2.0, 6.0]];
        let inv = invert(&a);
        let prod = matmul(&a, &inv);
        assert!((prod[0][0] - 1.0).abs() < 1e-12 && prod[0][1].abs() < 1e-12);
    }
}

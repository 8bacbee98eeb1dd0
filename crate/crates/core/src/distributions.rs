//! Special functions and the tail probabilities behind every p-value.
//!
//! ln Γ uses a Lanczos sum below 15 and the Stirling series above. The
//! regularized incomplete beta is a modified-Lentz continued fraction on
//! whichever side of the mean converges fastest; the incomplete gamma uses its
//! power series below `x = s + 1` and a continued fraction above.

use std::f64::consts::PI;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

const MAX_ITER: usize = 10_000;
const EPS: f64 = 1e-15;
const TINY: f64 = 1e-300;

/// A probability in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct TailProbability(f64);

impl TailProbability {
    pub fn new(value: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&value) {
            Ok(Self(value))
        } else {
            Err(Error::Domain(format!("{value} is not a probability")))
        }
    }

    /// Clamps rounding spill (e.g. `1 - x` slightly below zero) into range.
    fn clamped(value: f64) -> Self {
        Self(value.clamp(0.0, 1.0))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Three decimals, so anything below 5e-4 reads `0.000`.
impl fmt::Display for TailProbability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.3}", self.0)
    }
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// ln Γ(x) for `x > 0`.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || x.is_infinite() {
        return Err(Error::Domain(format!("ln_gamma needs x > 0, got {x}")));
    }
    Ok(ln_gamma_unchecked(x))
}

fn ln_gamma_unchecked(x: f64) -> f64 {
    if x == 1.0 || x == 2.0 {
        return 0.0;
    }
    if x < 0.5 {
        // Reflection: Γ(x)Γ(1−x) = π / sin(πx).
        return (PI / (PI * x).sin()).ln() - ln_gamma_unchecked(1.0 - x);
    }
    if x >= 15.0 {
        let x2 = x * x;
        let series = (1.0
            - (1.0 / 30.0 - (1.0 / 105.0 - (1.0 / 140.0 - 1.0 / (99.0 * x2)) / x2) / x2) / x2)
            / (12.0 * x);
        return (x - 0.5) * x.ln() - x + 0.5 * (2.0 * PI).ln() + series;
    }
    let z = x - 1.0;
    let mut sum = LANCZOS_COEF[0];
    for (i, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        sum += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + sum.ln()
}

/// Regularized incomplete beta function Iₓ(a, b).
pub fn reg_inc_beta(a: f64, b: f64, x: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
        return Err(Error::Domain(format!(
            "incomplete beta needs a, b > 0, got a = {a}, b = {b}"
        )));
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!(
            "incomplete beta needs x in [0, 1], got {x}"
        )));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x == 1.0 {
        return Ok(1.0);
    }
    let ln_front = ln_gamma_unchecked(a + b) - ln_gamma_unchecked(a) - ln_gamma_unchecked(b)
        + a * x.ln()
        + b * (1.0 - x).ln();
    let front = ln_front.exp();
    let value = if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_continued_fraction(a, b, x)? / a
    } else {
        1.0 - front * beta_continued_fraction(b, a, 1.0 - x)? / b
    };
    Ok(value.clamp(0.0, 1.0))
}

fn beta_continued_fraction(a: f64, b: f64, x: f64) -> Result<f64> {
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            return Ok(h);
        }
    }
    Err(Error::Domain(format!(
        "incomplete beta continued fraction did not converge for a = {a}, b = {b}, x = {x}"
    )))
}

/// Lower regularized incomplete gamma P(s, x) = γ(s, x) / Γ(s).
pub fn reg_inc_gamma_lower(s: f64, x: f64) -> Result<f64> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::Domain(format!(
            "incomplete gamma needs s > 0, got {s}"
        )));
    }
    if !(x >= 0.0) {
        return Err(Error::Domain(format!(
            "incomplete gamma needs x >= 0, got {x}"
        )));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x.is_infinite() {
        return Ok(1.0);
    }
    let ln_front = -x + s * x.ln() - ln_gamma_unchecked(s);
    let value = if x < s + 1.0 {
        let mut ap = s;
        let mut del = 1.0 / s;
        let mut sum = del;
        let mut converged = false;
        for _ in 0..MAX_ITER {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if del.abs() < sum.abs() * EPS {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::Domain(format!(
                "incomplete gamma series did not converge for s = {s}, x = {x}"
            )));
        }
        sum * ln_front.exp()
    } else {
        1.0 - gamma_continued_fraction(s, x)? * ln_front.exp()
    };
    Ok(value.clamp(0.0, 1.0))
}

fn gamma_continued_fraction(s: f64, x: f64) -> Result<f64> {
    let mut b = x + 1.0 - s;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..=MAX_ITER {
        let an = -(i as f64) * (i as f64 - s);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            return Ok(h);
        }
    }
    Err(Error::Domain(format!(
        "incomplete gamma continued fraction did not converge for s = {s}, x = {x}"
    )))
}

fn check_df(df: usize, name: &str) -> Result<()> {
    if df == 0 {
        Err(Error::Domain(format!("{name} must be at least 1")))
    } else {
        Ok(())
    }
}

/// Pr(|T| ≥ |t|) for Student's t with `df` degrees of freedom.
pub fn t_two_sided_p(t: f64, df: usize) -> Result<TailProbability> {
    check_df(df, "t degrees of freedom")?;
    if t.is_nan() {
        return Err(Error::Domain("t statistic is NaN".to_string()));
    }
    if t == 0.0 {
        return Ok(TailProbability(1.0));
    }
    if t.is_infinite() {
        return Ok(TailProbability(0.0));
    }
    let nu = df as f64;
    let x = nu / (nu + t * t);
    Ok(TailProbability::clamped(reg_inc_beta(nu / 2.0, 0.5, x)?))
}

/// Upper tail of F(df1, df2).
pub fn f_sf(f: f64, df1: usize, df2: usize) -> Result<TailProbability> {
    check_df(df1, "numerator degrees of freedom")?;
    check_df(df2, "denominator degrees of freedom")?;
    if !(f >= 0.0) {
        return Err(Error::Domain(format!("F statistic must be >= 0, got {f}")));
    }
    if f == 0.0 {
        return Ok(TailProbability(1.0));
    }
    if f.is_infinite() {
        return Ok(TailProbability(0.0));
    }
    let (d1, d2) = (df1 as f64, df2 as f64);
    let x = d2 / (d2 + d1 * f);
    Ok(TailProbability::clamped(reg_inc_beta(d2 / 2.0, d1 / 2.0, x)?))
}

/// Upper tail of the chi-square distribution, `1 − P(df/2, x/2)`.
pub fn chi2_sf(x: f64, df: usize) -> Result<TailProbability> {
    check_df(df, "chi-square degrees of freedom")?;
    if !(x >= 0.0) {
        return Err(Error::Domain(format!(
            "chi-square statistic must be >= 0, got {x}"
        )));
    }
    Ok(TailProbability::clamped(
        1.0 - reg_inc_gamma_lower(df as f64 / 2.0, x / 2.0)?,
    ))
}

/// Student-t quantile: the `t` with `Pr(T ≤ t) = prob`, found by bisection
/// on the tail probability until the bracket is narrower than 1e-12.
pub fn t_quantile(prob: f64, df: usize) -> Result<f64> {
    check_df(df, "t degrees of freedom")?;
    if !(prob > 0.0 && prob < 1.0) {
        return Err(Error::Domain(format!(
            "quantile level must lie in (0, 1), got {prob}"
        )));
    }
    if prob == 0.5 {
        return Ok(0.0);
    }
    if prob < 0.5 {
        return Ok(-t_quantile(1.0 - prob, df)?);
    }
    let target = 2.0 * (1.0 - prob);
    let tail = |t: f64| t_two_sided_p(t, df).map(TailProbability::value);
    let mut lo = 0.0;
    let mut hi = 1.0;
    while tail(hi)? > target {
        lo = hi;
        hi *= 2.0;
        if hi > 1e300 {
            return Err(Error::Domain(format!(
                "t quantile for level {prob} with {df} df is not representable"
            )));
        }
    }
    for _ in 0..2_000 {
        let mid = 0.5 * (lo + hi);
        if tail(mid)? > target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-12 * hi.max(1.0) {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

//! Dense matrices and rank-revealing least squares.
//!
//! The solver is a Householder QR with column pivoting. Columns whose pivot
//! falls below `rank_tol * |R[0,0]|` are treated as linearly dependent on the
//! columns already factored: they receive a coefficient of exactly zero and
//! are reported back so callers can exclude them from inference.

use std::ops::Index;

use crate::error::{Error, Result};

/// Default relative pivot tolerance for rank decisions.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

/// Row-major dense matrix with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::InvalidInput(format!(
                "matrix of shape {rows}x{cols} needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "non-finite entry at ({}, {})",
                pos / cols.max(1),
                pos % cols.max(1)
            )));
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from equal-length rows.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::InvalidInput(format!(
                    "row {i} has {} entries, expected {cols}",
                    r.len()
                )));
            }
            data.extend_from_slice(r);
        }
        Self::new(rows.len(), cols, data)
    }

    /// Builds a matrix from columns of equal length.
    pub fn from_columns<C: AsRef<[f64]>>(columns: &[C]) -> Result<Self> {
        let rows = columns.first().map_or(0, |c| c.as_ref().len());
        if let Some(bad) = columns.iter().position(|c| c.as_ref().len() != rows) {
            return Err(Error::InvalidInput(format!(
                "column {bad} has {} entries, expected {rows}",
                columns[bad].as_ref().len()
            )));
        }
        Self::from_fn(rows, columns.len(), |i, j| columns[j].as_ref()[i])
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let data = (0..rows * cols).map(|p| f(p / cols, p % cols)).collect();
        Self::new(rows, cols, data)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j);
            }
        }
        t
    }

    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::InvalidInput(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                let src = other.row(k);
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d += a * s;
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.cols {
            return Err(Error::InvalidInput(format!(
                "vector of length {} does not match {} columns",
                v.len(),
                self.cols
            )));
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// New matrix holding the listed columns, in the listed order.
    pub fn select_columns(&self, indices: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(self.rows * indices.len());
        for i in 0..self.rows {
            let row = self.row(i);
            data.extend(indices.iter().map(|&j| row[j]));
        }
        Matrix {
            rows: self.rows,
            cols: indices.len(),
            data,
        }
    }

    /// New matrix with a column of ones in front.
    pub fn with_leading_ones(&self) -> Matrix {
        let cols = self.cols + 1;
        let mut data = Vec::with_capacity(self.rows * cols);
        for i in 0..self.rows {
            data.push(1.0);
            data.extend_from_slice(self.row(i));
        }
        Matrix {
            rows: self.rows,
            cols,
            data,
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

/// Compact Householder QR of `X·P`.
///
/// `packed` holds R on and above the diagonal and the essential part of each
/// reflector below it (the leading reflector entry is an implicit 1).
#[derive(Debug, Clone)]
pub struct QrFactors {
    rows: usize,
    cols: usize,
    packed: Vec<f64>,
    tau: Vec<f64>,
    perm: Vec<usize>,
    rank: usize,
    dropped: Vec<usize>,
}

/// Householder QR with column pivoting.
///
/// At every step the remaining column with the largest trailing norm is
/// moved into place, so `|R[i,i]|` is non-increasing.
pub fn qr_pivoted(x: &Matrix, rank_tol: f64) -> Result<QrFactors> {
    let (m, n) = (x.rows, x.cols);
    if m == 0 || n == 0 {
        return Err(Error::InvalidInput(format!(
            "QR needs at least one row and one column, got {m}x{n}"
        )));
    }
    if !(rank_tol > 0.0 && rank_tol.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "rank tolerance must be positive, got {rank_tol}"
        )));
    }
    let mut a = x.data.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let steps = m.min(n);
    let mut tau = vec![0.0; steps];

    for k in 0..steps {
        // Norms are recomputed from scratch each step; downdating loses
        // accuracy exactly in the near-collinear cases we care about.
        let mut best = k;
        let mut best_norm = -1.0;
        for j in k..n {
            let norm: f64 = (k..m).map(|i| a[i * n + j] * a[i * n + j]).sum();
            if norm > best_norm {
                best_norm = norm;
                best = j;
            }
        }
        if best != k {
            for i in 0..m {
                a.swap(i * n + k, i * n + best);
            }
            perm.swap(k, best);
        }

        let norm_x = best_norm.sqrt();
        if norm_x == 0.0 {
            tau[k] = 0.0;
            continue;
        }
        let alpha = a[k * n + k];
        let beta = if alpha >= 0.0 { -norm_x } else { norm_x };
        tau[k] = (beta - alpha) / beta;
        let scale = 1.0 / (alpha - beta);
        for i in k + 1..m {
            a[i * n + k] *= scale;
        }
        a[k * n + k] = beta;

        for j in k + 1..n {
            let mut s = a[k * n + j];
            for i in k + 1..m {
                s += a[i * n + k] * a[i * n + j];
            }
            s *= tau[k];
            a[k * n + j] -= s;
            for i in k + 1..m {
                a[i * n + j] -= s * a[i * n + k];
            }
        }
    }

    let lead = a[0].abs();
    let rank = if lead == 0.0 {
        0
    } else {
        (0..steps)
            .take_while(|&k| a[k * n + k].abs() >= rank_tol * lead)
            .count()
    };
    let mut dropped: Vec<usize> = perm[rank..].to_vec();
    dropped.sort_unstable();

    Ok(QrFactors {
        rows: m,
        cols: n,
        packed: a,
        tau,
        perm,
        rank,
        dropped,
    })
}

impl QrFactors {
    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Original indices of columns judged linearly dependent, ascending.
    pub fn dropped_columns(&self) -> &[usize] {
        &self.dropped
    }

    /// Original indices of the columns kept in the model, ascending.
    pub fn retained_columns(&self) -> Vec<usize> {
        let mut kept = self.perm[..self.rank].to_vec();
        kept.sort_unstable();
        kept
    }

    /// `permutation()[k]` is the original index of the k-th pivoted column.
    pub fn permutation(&self) -> &[usize] {
        &self.perm
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    /// Upper-triangular factor, `min(rows, cols) x cols`.
    pub fn r(&self) -> Matrix {
        let steps = self.tau.len();
        let n = self.cols;
        let mut r = Matrix::zeros(steps, n);
        for i in 0..steps {
            for j in i..n {
                r.data[i * n + j] = self.packed[i * n + j];
            }
        }
        r
    }

    /// Orthonormal factor with `min(rows, cols)` columns.
    pub fn q_thin(&self) -> Matrix {
        let steps = self.tau.len();
        let mut q = Matrix::zeros(self.rows, steps);
        for j in 0..steps {
            let mut e = vec![0.0; self.rows];
            e[j] = 1.0;
            for k in (0..steps).rev() {
                self.apply_reflector(k, &mut e);
            }
            for i in 0..self.rows {
                q.data[i * steps + j] = e[i];
            }
        }
        q
    }

    fn apply_reflector(&self, k: usize, v: &mut [f64]) {
        let t = self.tau[k];
        if t == 0.0 {
            return;
        }
        let n = self.cols;
        let mut s = v[k];
        for i in k + 1..self.rows {
            s += self.packed[i * n + k] * v[i];
        }
        s *= t;
        v[k] -= s;
        for i in k + 1..self.rows {
            v[i] -= s * self.packed[i * n + k];
        }
    }

    /// Overwrites `v` with `Qᵀ v`.
    pub fn apply_qt(&self, v: &mut [f64]) {
        for k in 0..self.tau.len() {
            self.apply_reflector(k, v);
        }
    }

    /// Least-squares coefficients in original column order; dropped columns get 0.
    pub fn solve(&self, y: &[f64]) -> Result<Vec<f64>> {
        if y.len() != self.rows {
            return Err(Error::InvalidInput(format!(
                "response has {} entries but the design has {} rows",
                y.len(),
                self.rows
            )));
        }
        let mut qty = y.to_vec();
        self.apply_qt(&mut qty);
        let n = self.cols;
        let r = self.rank;
        let mut z = vec![0.0; r];
        for i in (0..r).rev() {
            let mut s = qty[i];
            for j in i + 1..r {
                s -= self.packed[i * n + j] * z[j];
            }
            z[i] = s / self.packed[i * n + i];
        }
        let mut beta = vec![0.0; n];
        for (k, value) in z.into_iter().enumerate() {
            beta[self.perm[k]] = value;
        }
        Ok(beta)
    }
}

/// Outcome of [`least_squares_solve`].
#[derive(Debug, Clone)]
pub struct LeastSquares {
    /// One entry per design column; exactly 0 for dropped columns.
    pub coefficients: Vec<f64>,
    pub rank: usize,
    pub dropped_columns: Vec<usize>,
    pub rss: f64,
    pub factors: QrFactors,
}

/// Minimises `‖y − X·β‖²` with the default rank tolerance.
pub fn least_squares_solve(x: &Matrix, y: &[f64]) -> Result<LeastSquares> {
    least_squares_solve_with_tol(x, y, DEFAULT_RANK_TOL)
}

pub fn least_squares_solve_with_tol(x: &Matrix, y: &[f64], rank_tol: f64) -> Result<LeastSquares> {
    if x.rows != y.len() {
        return Err(Error::InvalidInput(format!(
            "design has {} rows but response has {} entries",
            x.rows,
            y.len()
        )));
    }
    if let Some(pos) = y.iter().position(|v| !v.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "non-finite response at index {pos}"
        )));
    }
    let factors = qr_pivoted(x, rank_tol)?;
    let coefficients = factors.solve(y)?;
    let fitted = x.mul_vec(&coefficients)?;
    let rss = y
        .iter()
        .zip(&fitted)
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    Ok(LeastSquares {
        rank: factors.rank,
        dropped_columns: factors.dropped.clone(),
        coefficients,
        rss,
        factors,
    })
}

/// `(XᵀX)⁻¹` over the retained columns, rows and columns in ascending
/// original-index order (see [`QrFactors::retained_columns`]).
pub fn unscaled_covariance(f: &QrFactors) -> Result<Matrix> {
    let r = f.rank;
    if r == 0 {
        return Err(Error::DegenerateModel(
            "design has numerical rank 0".to_string(),
        ));
    }
    let n = f.cols;
    // Invert the leading r x r block of R column by column.
    let mut rinv = vec![0.0; r * r];
    for j in 0..r {
        rinv[j * r + j] = 1.0 / f.packed[j * n + j];
        for i in (0..j).rev() {
            let mut s = 0.0;
            for k in i + 1..=j {
                s += f.packed[i * n + k] * rinv[k * r + j];
            }
            rinv[i * r + j] = -s / f.packed[i * n + i];
        }
    }
    // (R Rᵀ)⁻¹ in pivoted order is R⁻¹ R⁻ᵀ.
    let mut piv_cov = vec![0.0; r * r];
    for i in 0..r {
        for j in i..r {
            let s: f64 = (j..r).map(|k| rinv[i * r + k] * rinv[j * r + k]).sum();
            piv_cov[i * r + j] = s;
            piv_cov[j * r + i] = s;
        }
    }
    let retained = f.retained_columns();
    let pivot_pos: Vec<usize> = retained
        .iter()
        .map(|orig| f.perm.iter().position(|p| p == orig).unwrap_or(0))
        .collect();
    Matrix::from_fn(r, r, |a, b| piv_cov[pivot_pos[a] * r + pivot_pos[b]])
}

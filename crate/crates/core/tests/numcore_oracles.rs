use mvreg_core::numcore::{
    least_squares_solve, qr_pivoted, unscaled_covariance, Matrix, DEFAULT_RANK_TOL,
};
use mvreg_testkit as oracle;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| rng.random_range(-3.0..3.0)).unwrap()
}

fn permuted(x: &Matrix, perm: &[usize]) -> Matrix {
    x.select_columns(perm)
}

#[test]
fn qr_reconstructs_and_matches_gram_schmidt() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let x = random_matrix(&mut rng, 10, 4);
    let f = qr_pivoted(&x, DEFAULT_RANK_TOL).unwrap();
    assert_eq!(f.rank(), 4);

    let xp = permuted(&x, f.permutation());
    let qr = f.q_thin().matmul(&f.r()).unwrap();
    let rel = oracle::frobenius_diff(&xp.to_rows(), &qr.to_rows()) / xp.frobenius_norm();
    assert!(rel < 1e-10, "relative reconstruction error {rel}");

    // Gram-Schmidt on the same permuted columns gives the same R up to row signs.
    let (_, r_gs) = oracle::gram_schmidt(&xp.to_rows());
    let r = f.r();
    for i in 0..4 {
        let sign = (r[(i, i)] / r_gs[i][i]).signum();
        for j in 0..4 {
            assert!(
                (r[(i, j)] - sign * r_gs[i][j]).abs() < 1e-10,
                "R[{i},{j}] = {} vs {}",
                r[(i, j)],
                sign * r_gs[i][j]
            );
        }
    }
}

#[test]
fn pivots_are_non_increasing() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let x = random_matrix(&mut rng, 12, 6);
        let r = qr_pivoted(&x, DEFAULT_RANK_TOL).unwrap().r();
        for i in 1..6 {
            assert!(r[(i, i)].abs() <= r[(i - 1, i - 1)].abs() * (1.0 + 1e-12));
        }
    }
}

#[test]
fn duplicated_column_keeps_rss_and_is_flagged() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let base = random_matrix(&mut rng, 15, 3);
    let y: Vec<f64> = (0..15).map(|_| rng.random_range(-5.0..5.0)).collect();
    let dup = base.select_columns(&[0, 1, 2, 1]);
    let full = least_squares_solve(&dup, &y).unwrap();
    assert_eq!(full.rank, 3);
    assert_eq!(full.dropped_columns.len(), 1);
    assert!(full.dropped_columns[0] == 1 || full.dropped_columns[0] == 3);
    assert_eq!(full.coefficients[full.dropped_columns[0]], 0.0);

    let reduced = oracle::normal_equations_ols(&base.to_rows(), &y, false);
    assert!((full.rss - reduced.rss).abs() < 1e-9 * reduced.rss.max(1.0));
}

#[test]
fn covariance_matches_explicit_inverse() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let x = random_matrix(&mut rng, 8, 3);
    let cov = unscaled_covariance(&qr_pivoted(&x, DEFAULT_RANK_TOL).unwrap()).unwrap();
    let rows = x.to_rows();
    let inv = oracle::invert(&oracle::matmul(&oracle::transpose(&rows), &rows));
    for i in 0..3 {
        for j in 0..3 {
            assert!((cov[(i, j)] - inv[i][j]).abs() < 1e-9);
            assert!((cov[(i, j)] - cov[(j, i)]).abs() < 1e-12);
        }
    }
}

#[test]
fn covariance_skips_dropped_columns() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let base = random_matrix(&mut rng, 9, 2);
    let x = base.select_columns(&[0, 1, 0]);
    let f = qr_pivoted(&x, DEFAULT_RANK_TOL).unwrap();
    let cov = unscaled_covariance(&f).unwrap();
    assert_eq!(cov.rows(), 2);
    let kept = f.retained_columns();
    let rows = x.select_columns(&kept).to_rows();
    let inv = oracle::invert(&oracle::matmul(&oracle::transpose(&rows), &rows));
    for i in 0..2 {
        for j in 0..2 {
            assert!((cov[(i, j)] - inv[i][j]).abs() < 1e-9);
        }
    }
}

fn problem() -> impl Strategy<Value = (usize, usize, u64)> {
    (2usize..7).prop_flat_map(|p| (Just(p), (p + 2)..30usize, any::<u64>()))
        .prop_map(|(p, n, seed)| (n, p, seed))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn round_trip_and_orthogonality((n, p, seed) in problem()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_matrix(&mut rng, n, p);
        let y: Vec<f64> = (0..n).map(|_| rng.random_range(-10.0..10.0)).collect();

        let ls = least_squares_solve(&x, &y).unwrap();
        prop_assert_eq!(ls.rank, p);
        let xp = permuted(&x, ls.factors.permutation());
        let qr = ls.factors.q_thin().matmul(&ls.factors.r()).unwrap();
        let rel = oracle::frobenius_diff(&xp.to_rows(), &qr.to_rows()) / xp.frobenius_norm();
        prop_assert!(rel < 1e-10);

        let fitted = x.mul_vec(&ls.coefficients).unwrap();
        let resid: Vec<f64> = y.iter().zip(&fitted).map(|(a, b)| a - b).collect();
        let scale = x.frobenius_norm() * y.iter().map(|v| v * v).sum::<f64>().sqrt();
        let grad = x.transpose().mul_vec(&resid).unwrap();
        prop_assert!(grad.iter().all(|g| g.abs() < 1e-8 * scale.max(1.0)));
    }

    #[test]
    fn rss_is_locally_optimal((n, p, seed) in problem(), which in 0usize..7, up in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_matrix(&mut rng, n, p);
        let y: Vec<f64> = (0..n).map(|_| rng.random_range(-10.0..10.0)).collect();
        let ls = least_squares_solve(&x, &y).unwrap();
        let mut beta = ls.coefficients.clone();
        beta[which % p] += if up { 1e-3 } else { -1e-3 };
        let fitted = x.mul_vec(&beta).unwrap();
        let rss: f64 = y.iter().zip(&fitted).map(|(a, b)| (a - b) * (a - b)).sum();
        prop_assert!(rss >= ls.rss);
    }

    #[test]
    fn column_shuffle_leaves_fit_unchanged((n, p, seed) in problem()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_matrix(&mut rng, n, p);
        let y: Vec<f64> = (0..n).map(|_| rng.random_range(-10.0..10.0)).collect();
        let mut order: Vec<usize> = (0..p).collect();
        for i in (1..p).rev() {
            order.swap(i, rng.random_range(0..=i));
        }
        let a = least_squares_solve(&x, &y).unwrap();
        let b = least_squares_solve(&x.select_columns(&order), &y).unwrap();
        let mut unshuffled = vec![0.0; p];
        for (pos, &j) in order.iter().enumerate() {
            unshuffled[j] = b.coefficients[pos];
        }
        let fa = x.mul_vec(&a.coefficients).unwrap();
        let fb = x.mul_vec(&unshuffled).unwrap();
        for (u, v) in fa.iter().zip(&fb) {
            prop_assert!((u - v).abs() < 1e-10 * (1.0 + u.abs()));
        }
    }
}

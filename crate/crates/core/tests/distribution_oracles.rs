use std::f64::consts::PI;

use mvreg_core::distributions::{
    chi2_sf, f_sf, ln_gamma, reg_inc_beta, reg_inc_gamma_lower, t_quantile, t_two_sided_p,
};
use mvreg_testkit as oracle;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn ln_gamma_against_stirling_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..200 {
        let x: f64 = rng.random_range(0.1..200.0);
        let got = ln_gamma(x).unwrap();
        let want = oracle::ln_gamma_stirling(x);
        assert!((got - want).abs() < 1e-12, "x = {x}: {got} vs {want}");
    }
}

#[test]
fn ln_gamma_large_arguments_are_relatively_exact() {
    // Absolute error is bounded by the spacing of doubles near ln Γ(x) itself.
    for x in [1e3, 5e4, 1e6] {
        let got = ln_gamma(x).unwrap();
        let want = oracle::ln_gamma_stirling(x);
        assert!(((got - want) / want).abs() < 1e-15, "x = {x}");
    }
}

#[test]
fn ln_gamma_recurrence() {
    for x in [0.1, 0.3, 0.7, 1.5, 3.3, 14.2, 14.9, 15.0, 40.0] {
        let lhs = ln_gamma(x + 1.0).unwrap();
        let rhs = ln_gamma(x).unwrap() + f64::ln(x);
        assert!((lhs - rhs).abs() < 1e-12, "x = {x}");
    }
}

#[test]
fn incomplete_beta_against_quadrature() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..100 {
        let a: f64 = rng.random_range(1.0..8.0);
        let b: f64 = rng.random_range(1.0..8.0);
        let x: f64 = rng.random_range(0.0..1.0);
        let got = reg_inc_beta(a, b, x).unwrap();
        let want = oracle::inc_beta_quadrature(a, b, x);
        assert!((got - want).abs() < 1e-10, "I_{x}({a},{b}): {got} vs {want}");
    }
}

#[test]
fn incomplete_gamma_against_quadrature() {
    let got = reg_inc_gamma_lower(2.5, 3.1).unwrap();
    let want = oracle::inc_gamma_lower_quadrature(2.5, 3.1);
    assert!((got - want).abs() < 1e-9, "{got} vs {want}");

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100 {
        let s: f64 = rng.random_range(1.0..10.0);
        let x: f64 = rng.random_range(0.0..25.0);
        let got = reg_inc_gamma_lower(s, x).unwrap();
        let want = oracle::inc_gamma_lower_quadrature(s, x);
        assert!((got - want).abs() < 1e-10, "P({s},{x}): {got} vs {want}");
    }
}

#[test]
fn chi2_df1_normal_identity() {
    let p = chi2_sf(3.2, 1).unwrap().value();
    let want = oracle::chi2_sf_quadrature(3.2, 1);
    assert!((p - want).abs() < 1e-9);
    assert!((p - 0.0736).abs() < 5e-5);
}

#[test]
fn closed_form_identities() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..100 {
        let t: f64 = rng.random_range(-50.0..50.0);
        let cauchy = 1.0 - 2.0 * (t.abs().atan() / PI);
        assert!((t_two_sided_p(t, 1).unwrap().value() - cauchy).abs() < 1e-10);

        let x: f64 = rng.random_range(0.0..40.0);
        assert!((chi2_sf(x, 2).unwrap().value() - (-x / 2.0).exp()).abs() < 1e-10);

        let df: usize = rng.random_range(1..200);
        let tp = t_two_sided_p(t, df).unwrap().value();
        let fp = f_sf(t * t, 1, df).unwrap().value();
        assert!((tp - fp).abs() < 1e-10);
    }
}

#[test]
fn tails_against_quadrature() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..100 {
        let df: u32 = rng.random_range(1..60);
        let t: f64 = rng.random_range(-8.0..8.0);
        let got = t_two_sided_p(t, df as usize).unwrap().value();
        assert!((got - oracle::t_two_sided_quadrature(t, df)).abs() < 1e-9);

        let d1: u32 = rng.random_range(2..30);
        let d2: u32 = rng.random_range(1..60);
        let f: f64 = rng.random_range(0.0..10.0);
        let got = f_sf(f, d1 as usize, d2 as usize).unwrap().value();
        assert!((got - oracle::f_sf_quadrature(f, d1, d2)).abs() < 1e-9);

        let k: u32 = rng.random_range(1..30);
        let x: f64 = rng.random_range(0.0..40.0);
        let got = chi2_sf(x, k as usize).unwrap().value();
        assert!((got - oracle::chi2_sf_quadrature(x, k)).abs() < 1e-9);
    }
}

#[test]
fn t_quantile_inverts_the_tail() {
    for df in [1, 2, 5, 9, 52, 80, 1000] {
        for level in [0.9, 0.95, 0.99] {
            let q = t_quantile((1.0 + level) / 2.0, df).unwrap();
            let back = t_two_sided_p(q, df).unwrap().value();
            assert!((back - (1.0 - level)).abs() < 1e-10, "df {df} level {level}");
        }
    }
}

proptest! {
    #[test]
    fn tails_are_probabilities_and_monotone(
        x in 0.0f64..200.0, dx in 0.0f64..20.0, d1 in 1usize..300, d2 in 1usize..300
    ) {
        for (a, b) in [
            (t_two_sided_p(x, d1).unwrap().value(), t_two_sided_p(x + dx, d1).unwrap().value()),
            (f_sf(x, d1, d2).unwrap().value(), f_sf(x + dx, d1, d2).unwrap().value()),
            (chi2_sf(x, d1).unwrap().value(), chi2_sf(x + dx, d1).unwrap().value()),
        ] {
            prop_assert!((0.0..=1.0).contains(&a) && (0.0..=1.0).contains(&b));
            prop_assert!(b <= a + 1e-15);
        }
    }

    #[test]
    fn beta_symmetry(a in 0.1f64..50.0, b in 0.1f64..50.0, x in 0.0f64..=1.0) {
        let s = reg_inc_beta(a, b, x).unwrap() + reg_inc_beta(b, a, 1.0 - x).unwrap();
        prop_assert!((s - 1.0).abs() < 1e-10);
    }

    #[test]
    fn chi2_is_complement_of_lower_gamma(x in 0.0f64..100.0, df in 1usize..100) {
        let lower = reg_inc_gamma_lower(df as f64 / 2.0, x / 2.0).unwrap();
        prop_assert_eq!(chi2_sf(x, df).unwrap().value(), (1.0 - lower).clamp(0.0, 1.0));
    }
}

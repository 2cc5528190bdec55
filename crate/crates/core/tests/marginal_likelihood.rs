mod common;

use common::quad::{log_ml_by_quadrature, log_ml_intercept_only_2d};
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use subho_core::rng::seeded;
use subho_core::subho_select::{log_marginal_likelihood, SelectionHyper};

fn design(n: usize, k: usize, rng: &mut impl Rng) -> DMatrix<f64> {
    DMatrix::from_fn(n, k + 1, |_, j| if j == 0 { 1.0 } else { StandardNormal.sample(rng) })
}

#[test]
fn intercept_only_matches_two_dimensional_quadrature() {
    let y = [1.0, -1.0, 2.0, 0.0];
    let h = SelectionHyper::default();
    let closed = log_marginal_likelihood(&DVector::from_column_slice(&y), &DMatrix::from_element(4, 1, 1.0), &h).unwrap();
    let quad = log_ml_intercept_only_2d(&y, 1.0, 1.0, 1e-10);
    assert!((closed - quad).abs() <= 1e-6 * closed.abs(), "closed {closed} quadrature {quad}");
}

#[test]
fn closed_form_matches_quadrature_on_random_instances() {
    let mut rng = seeded(11);
    for trial in 0..12 {
        let n = rng.random_range(2..=8);
        let k = trial % 3;
        let x = design(n, k, &mut rng);
        let y = DVector::from_fn(n, |_, _| 0.5 + 1.5 * Distribution::<f64>::sample(&StandardNormal, &mut rng));
        let h = SelectionHyper {
            c: rng.random_range(0.5..3.0),
            d: rng.random_range(0.5..3.0),
            ..Default::default()
        };
        let closed = log_marginal_likelihood(&y, &x, &h).unwrap();
        let quad = log_ml_by_quadrature(&y, &x, h.c, h.d, 1e-9);
        assert!(
            (closed - quad).abs() <= 1e-6 * closed.abs(),
            "trial {trial} n={n} k={k}: closed {closed} quadrature {quad}"
        );
    }
}

#[test]
fn exact_copy_beats_intercept_only() {
    let xcol = [0.3, -1.2, 0.8, 2.0, -0.4];
    let y = DVector::from_column_slice(&xcol);
    let x1 = DMatrix::from_fn(5, 2, |i, j| if j == 0 { 1.0 } else { xcol[i] });
    let x0 = DMatrix::from_element(5, 1, 1.0);
    let h = SelectionHyper::default();
    let with = log_marginal_likelihood(&y, &x1, &h).unwrap();
    assert!(with > log_marginal_likelihood(&y, &x0, &h).unwrap());
    assert_eq!(with.to_bits(), log_marginal_likelihood(&y, &x1, &h).unwrap().to_bits());
}

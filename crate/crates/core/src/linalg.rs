//! Dense linear-algebra helpers shared across estimators.

use nalgebra::{Cholesky, DMatrix, Dyn};

use crate::error::{Error, Result};

pub fn cholesky(m: DMatrix<f64>, context: &str) -> Result<Cholesky<f64, Dyn>> {
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::NotPositiveDefinite {
            context: format!("{context}: non-finite entries"),
        });
    }
    Cholesky::new(m).ok_or_else(|| Error::NotPositiveDefinite {
        context: context.to_owned(),
    })
}

/// Inverse of a symmetric positive-definite matrix, symmetrized.
pub fn spd_inverse(m: &DMatrix<f64>, context: &str) -> Result<DMatrix<f64>> {
    let inv = cholesky(m.clone(), context)?.inverse();
    Ok(symmetrize(&inv))
}

pub fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// Partial correlations `-w_ab / sqrt(w_aa w_bb)` with unit diagonal.
pub fn partial_correlations(omega: &DMatrix<f64>) -> DMatrix<f64> {
    let p = omega.nrows();
    let scale: Vec<f64> = (0..p).map(|a| omega[(a, a)].sqrt()).collect();
    DMatrix::from_fn(p, p, |a, b| {
        if a == b {
            1.0
        } else {
            -omega[(a, b)] / (scale[a] * scale[b])
        }
    })
}

pub fn is_symmetric(m: &DMatrix<f64>) -> bool {
    m.is_square()
        && (0..m.nrows()).all(|i| (0..i).all(|j| m[(i, j)] == m[(j, i)]))
}

pub fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    m.clone()
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

//! Monte-Carlo moment checks against closed-form Gaussian moments.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};

/// Sample mean and (divisor `N`) covariance of the rows of `draws`.
pub fn sample_moments(draws: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let n = draws.nrows() as f64;
    let mean = draws.row_mean().transpose();
    let centred = DMatrix::from_fn(draws.nrows(), draws.ncols(), |i, j| draws[(i, j)] - mean[j]);
    (mean, centred.tr_mul(&centred) / n)
}

/// Largest absolute z-score of the sample mean and covariance entries
/// against `N(mean, cov)`, using Gaussian standard errors
/// `sqrt(S_jj / N)` and `sqrt((S_jj S_kk + S_jk^2) / N)`.
/// `scale` multiplies the variances (2 when comparing two independent samples).
pub fn max_z(
    mean_hat: &DVector<f64>,
    cov_hat: &DMatrix<f64>,
    mean: &DVector<f64>,
    cov: &DMatrix<f64>,
    n: usize,
    scale: f64,
) -> (f64, f64) {
    let nf = n as f64;
    let p = mean.len();
    let zm = (0..p)
        .map(|j| (mean_hat[j] - mean[j]).abs() / (scale * cov[(j, j)] / nf).sqrt())
        .fold(0.0, f64::max);
    let mut zc: f64 = 0.0;
    for j in 0..p {
        for k in j..p {
            let se = (scale * (cov[(j, j)] * cov[(k, k)] + cov[(j, k)].powi(2)) / nf).sqrt();
            zc = zc.max((cov_hat[(j, k)] - cov[(j, k)]).abs() / se);
        }
    }
    (zm, zc)
}

//! Wishart and inverse-Wishart draws via the Bartlett decomposition.
//!
//! `Wishart(df, S)` has mean `df * S`. If `W ~ Wishart(df, S^-1)` then
//! `W^-1 ~ InvWishart(df, S)` with mean `S / (df - p - 1)`.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg;

/// Wishart sampler holding the lower Cholesky factor of the scale matrix.
#[derive(Debug, Clone)]
pub struct Wishart {
    df: f64,
    scale_factor: DMatrix<f64>,
}

impl Wishart {
    pub fn new(df: f64, scale: &DMatrix<f64>) -> Result<Self> {
        let p = scale.nrows();
        if !(df > (p as f64) - 1.0) {
            return Err(Error::Config(format!(
                "Wishart degrees of freedom {df} must exceed p - 1 = {}",
                p as f64 - 1.0
            )));
        }
        let chol = linalg::cholesky(scale.clone(), "Wishart scale")?;
        Ok(Self {
            df,
            scale_factor: chol.l(),
        })
    }

    pub fn dim(&self) -> usize {
        self.scale_factor.nrows()
    }

    /// Lower-triangular `L A` where `A` is the Bartlett factor, so that
    /// `(L A)(L A)'` is a Wishart draw.
    pub fn sample_factor<R: Rng + ?Sized>(&self, rng: &mut R) -> DMatrix<f64> {
        let p = self.dim();
        let mut a = DMatrix::<f64>::zeros(p, p);
        for i in 0..p {
            let chi = ChiSquared::new(self.df - i as f64).expect("df checked at construction");
            a[(i, i)] = chi.sample(rng).sqrt();
            for j in 0..i {
                a[(i, j)] = StandardNormal.sample(rng);
            }
        }
        &self.scale_factor * a
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> DMatrix<f64> {
        let f = self.sample_factor(rng);
        linalg::symmetrize(&(&f * f.transpose()))
    }

    /// Returns `(W, W^-1)` for one draw `W`, inverting through the triangular factor.
    pub fn sample_with_inverse<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
    ) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
        let f = self.sample_factor(rng);
        let w = linalg::symmetrize(&(&f * f.transpose()));
        let p = self.dim();
        let f_inv = f
            .solve_lower_triangular(&DMatrix::identity(p, p))
            .ok_or_else(|| Error::NotPositiveDefinite {
                context: "Bartlett factor is singular".into(),
            })?;
        let inv = linalg::symmetrize(&(f_inv.transpose() * f_inv));
        Ok((w, inv))
    }
}

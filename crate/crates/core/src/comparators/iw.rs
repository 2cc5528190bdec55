//! Conjugate inverse-Wishart estimator: `Sigma ~ IW(m, V)` with posterior
//! `IW(m + n, V + X'X)` for centered data.

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::data_io::StandardizedDataset;
use crate::error::{Error, Result};
use crate::graph::{GraphEstimate, PartialCorrEstimate};
use crate::linalg;
use crate::rng::{self, Domain};
use crate::wishart::Wishart;

#[derive(Debug, Clone, PartialEq)]
pub struct IwConfig {
    /// Prior degrees of freedom; `None` means `p + 2`.
    pub df: Option<f64>,
    /// Prior scale; `None` means the identity.
    pub scale: Option<DMatrix<f64>>,
    pub n_draws: usize,
    pub ci_level: f64,
    pub seed: u64,
}

impl Default for IwConfig {
    fn default() -> Self {
        Self {
            df: None,
            scale: None,
            n_draws: 2000,
            ci_level: 0.5,
            seed: 0,
        }
    }
}

impl IwConfig {
    fn resolve(&self, p: usize) -> Result<(f64, DMatrix<f64>)> {
        let df = self.df.unwrap_or(p as f64 + 2.0);
        if !(df > p as f64 + 1.0) {
            return Err(Error::Config(format!("IW degrees of freedom {df} must exceed p + 1")));
        }
        let scale = self.scale.clone().unwrap_or_else(|| DMatrix::identity(p, p));
        if scale.shape() != (p, p) || !linalg::is_symmetric(&scale) {
            return Err(Error::Config("IW scale must be a symmetric p x p matrix".into()));
        }
        if !(self.ci_level > 0.0 && self.ci_level <= 1.0) || self.n_draws == 0 {
            return Err(Error::Config("need 0 < ci_level <= 1 and at least one draw".into()));
        }
        Ok((df, scale))
    }
}

fn posterior_scale(x: &DMatrix<f64>, scale: &DMatrix<f64>) -> DMatrix<f64> {
    linalg::symmetrize(&(scale + x.tr_mul(x)))
}

/// Precision point estimate `(n + 1) (V + X'X)^-1` for an `n x p` data matrix.
pub fn iw_precision_estimate(x: &DMatrix<f64>, config: &IwConfig) -> Result<DMatrix<f64>> {
    let (_, scale) = config.resolve(x.ncols())?;
    let s = posterior_scale(x, &scale);
    Ok(linalg::spd_inverse(&s, "V + X'X")? * (x.nrows() as f64 + 1.0))
}

/// Partial correlations rescaled from [`iw_precision_estimate`].
pub fn iw_point_estimate(data: &StandardizedDataset, config: &IwConfig) -> Result<PartialCorrEstimate> {
    let omega = iw_precision_estimate(data.values(), config)?;
    Ok(PartialCorrEstimate::from_precision(&omega))
}

/// Lower and upper empirical quantiles (linear interpolation) of a sorted sample.
fn quantile(sorted: &[f64], prob: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * prob;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Posterior law of the precision: `Omega ~ Wishart(m + n, (V + X'X)^-1)`, so that
/// `Omega^-1 ~ IW(m + n, V + X'X)`.
pub fn iw_posterior_precision(x: &DMatrix<f64>, config: &IwConfig) -> Result<Wishart> {
    let (df, scale) = config.resolve(x.ncols())?;
    let s = posterior_scale(x, &scale);
    let s_inv = linalg::spd_inverse(&s, "V + X'X")?;
    Wishart::new(df + x.nrows() as f64, &s_inv)
}

/// Partial-correlation draws for every upper-triangle pair, one row per draw.
/// Draw `i` uses its own substream, so the result is independent of threading.
pub fn iw_psi_draws(data: &StandardizedDataset, config: &IwConfig) -> Result<Vec<Vec<f64>>> {
    let p = data.p();
    let wishart = iw_posterior_precision(data.values(), config)?;
    Ok((0..config.n_draws)
        .into_par_iter()
        .map(|i| {
            let mut r = rng::stream(config.seed, Domain::Posterior, i as u64);
            let omega = wishart.sample(&mut r);
            let psi = linalg::partial_correlations(&omega);
            (0..p)
                .flat_map(|a| (a + 1..p).map(move |b| (a, b)))
                .map(|(a, b)| psi[(a, b)])
                .collect()
        })
        .collect())
}

/// Edge `(a, b)` iff the central `ci_level` credible interval of `psi_ab` excludes zero.
pub fn iw_graph(data: &StandardizedDataset, config: &IwConfig) -> Result<GraphEstimate> {
    let p = data.p();
    let draws = iw_psi_draws(data, config)?;
    let lower = 0.5 * (1.0 - config.ci_level);
    let upper = 0.5 * (1.0 + config.ci_level);
    let pairs: Vec<(usize, usize)> = (0..p).flat_map(|a| (a + 1..p).map(move |b| (a, b))).collect();
    let mut column = vec![0.0; draws.len()];
    let mut edges = Vec::new();
    for (k, &(a, b)) in pairs.iter().enumerate() {
        for (c, d) in column.iter_mut().zip(&draws) {
            *c = d[k];
        }
        column.sort_by(f64::total_cmp);
        let (lo, hi) = (quantile(&column, lower), quantile(&column, upper));
        if lo > 0.0 || hi < 0.0 {
            edges.push((a, b));
        }
    }
    GraphEstimate::from_edges(p, edges)
}

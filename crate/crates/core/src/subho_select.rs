//! Step-up model selection over the rank-ordered predictors of one node.
//!
//! Predictors are ranked by the magnitude of their shrunk posterior-mean
//! coefficients. Only the nested models `{}, {R(1)}, {R(1), R(2)}, ...` up to
//! size `K` are scored, each by its conjugate working-model marginal
//! likelihood times a Beta-Bernoulli model-size prior.

use nalgebra::{DMatrix, DVector};
use statrs::function::gamma::ln_gamma;

use crate::data_io::NodeView;
use crate::error::{Error, Result};
use crate::linalg;

/// Predictor ranking for one node, by position in the node's predictor list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankedSpace {
    /// `order[k]` is the predictor position (0-based, excluding the intercept)
    /// with the `k+1`-th largest magnitude.
    pub order: Vec<usize>,
    /// Largest model size considered.
    pub max_size: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelectionHyper {
    /// Working-prior inverse-gamma shape.
    pub c: f64,
    /// Working-prior inverse-gamma rate.
    pub d: f64,
    pub alpha_star: f64,
    pub beta_star: f64,
}

impl Default for SelectionHyper {
    fn default() -> Self {
        Self {
            c: 1.0,
            d: 1.0,
            alpha_star: 1.0,
            beta_star: 1.0,
        }
    }
}

impl SelectionHyper {
    pub fn validate(&self) -> Result<()> {
        if [self.c, self.d, self.alpha_star, self.beta_star]
            .iter()
            .all(|v| *v > 0.0 && v.is_finite())
        {
            Ok(())
        } else {
            Err(Error::Config(
                "selection hyperparameters must be positive and finite".into(),
            ))
        }
    }
}

/// Inclusion indicators over a node's predictors (intercept implicit).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GammaVector(pub Vec<bool>);

impl GammaVector {
    pub fn size(&self) -> usize {
        self.0.iter().filter(|&&g| g).count()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn included(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().filter(|(_, g)| **g).map(|(i, _)| i)
    }
}

/// Default cap `min(p - 1, max(10, ceil(ln n)))`.
pub fn default_max_size(n: usize, p: usize) -> usize {
    let log_cap = (n as f64).ln().ceil() as usize;
    (p - 1).min(log_cap.max(10))
}

/// Ranks predictors by descending `|beta|`; `beta_mean[0]` is the intercept
/// and is skipped. Ties keep ascending predictor order.
pub fn rank_predictors(beta_mean: &DVector<f64>, max_size: usize) -> RankedSpace {
    let mags: Vec<f64> = beta_mean.iter().skip(1).map(|b| b.abs()).collect();
    let mut order: Vec<usize> = (0..mags.len()).collect();
    order.sort_by(|&i, &j| mags[j].total_cmp(&mags[i]).then(i.cmp(&j)));
    RankedSpace {
        max_size: max_size.min(order.len()),
        order,
    }
}

/// Log marginal likelihood of `y` under `y ~ N(X b, s2 I)`, `b ~ N(0, s2 I)`,
/// `s2 ~ IG(c, d)`, where `design` already contains the intercept column.
pub fn log_marginal_likelihood(
    y: &DVector<f64>,
    design: &DMatrix<f64>,
    hyper: &SelectionHyper,
) -> Result<f64> {
    let n = y.len() as f64;
    let size = design.ncols().saturating_sub(1);
    let mut m = design.tr_mul(design);
    for j in 0..m.nrows() {
        m[(j, j)] += 1.0;
    }
    let xty = design.tr_mul(y);
    let chol = linalg::cholesky(m, "working-model precision").map_err(|_| Error::NonFiniteScore { size })?;
    let l = chol.l_dirty();
    // log|V*| = -log|I + X'X|
    let log_det_v: f64 = -2.0 * (0..l.nrows()).map(|i| l[(i, i)].ln()).sum::<f64>();
    // mu*' V*^-1 mu* = (X'y)' (I + X'X)^-1 X'y = |L^-1 X'y|^2
    let half = l
        .solve_lower_triangular(&xty)
        .ok_or(Error::NonFiniteScore { size })?;
    let fit = half.norm_squared();
    let c_post = hyper.c + 0.5 * n;
    let d_post = hyper.d + 0.5 * (y.norm_squared() - fit);
    let value = hyper.c * hyper.d.ln() + ln_gamma(c_post)
        - ln_gamma(hyper.c)
        - 0.5 * n * (2.0 * std::f64::consts::PI).ln()
        + 0.5 * log_det_v
        - c_post * d_post.ln();
    if value.is_finite() && d_post > 0.0 {
        Ok(value)
    } else {
        Err(Error::NonFiniteScore { size })
    }
}

/// Log Beta-Bernoulli prior of one specific model of size `size` among
/// `p - 1` candidate predictors.
pub fn log_model_prior(size: usize, p: usize, hyper: &SelectionHyper) -> f64 {
    let (a, b) = (hyper.alpha_star, hyper.beta_star);
    let m = (p - 1) as f64;
    let k = size as f64;
    ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + ln_gamma(a + k) + ln_gamma(m + b - k)
        - ln_gamma(a + b + m)
}

/// Unnormalized log posterior of the rank-`k` model for every `k = 0..=K`.
pub fn score_models(view: &NodeView, space: &RankedSpace, hyper: &SelectionHyper) -> Result<Vec<f64>> {
    let x = view.design();
    let y = view.response();
    let p = view.n_coef();
    let n = view.n();
    (0..=space.max_size)
        .map(|k| {
            let mut design = DMatrix::from_element(n, k + 1, 1.0);
            for (j, &pos) in space.order[..k].iter().enumerate() {
                design.set_column(j + 1, &x.column(pos + 1));
            }
            Ok(log_marginal_likelihood(y, &design, hyper)? + log_model_prior(k, p, hyper))
        })
        .collect()
}

/// MAP model over the nested rank-prefix models; ties go to the smaller model.
pub fn select_model(view: &NodeView, space: &RankedSpace, hyper: &SelectionHyper) -> Result<GammaVector> {
    hyper.validate()?;
    let scores = score_models(view, space, hyper)?;
    let best = scores
        .iter()
        .enumerate()
        .fold(0, |best, (k, s)| if *s > scores[best] { k } else { best });
    let mut gamma = vec![false; space.order.len()];
    for &pos in &space.order[..best] {
        gamma[pos] = true;
    }
    Ok(GammaVector(gamma))
}

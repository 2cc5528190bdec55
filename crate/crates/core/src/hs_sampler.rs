//! Gibbs sampler for a single node-wise regression under the Horseshoe prior.
//!
//! Model for design `X` (intercept column included) and response `y`:
//!
//! ```text
//! y | beta, s2          ~ N(X beta, s2 I)
//! beta_b | l2_b, t2, s2 ~ N(0, l2_b t2 s2)          b = 0..p-1
//! l2_b | nu_b ~ IG(1/2, 1/nu_b),   nu_b ~ IG(1/2, 1)
//! t2 | xi     ~ IG(1/2, 1/xi),     xi   ~ IG(1/2, 1)
//! s2          ~ IG(a0, b0)
//! ```
//!
//! The half-Cauchy scales are written as inverse-gamma mixtures so every full
//! conditional is conjugate:
//!
//! ```text
//! beta | .  ~ N(A^-1 X'y, s2 A^-1),  A = X'X + diag(1 / (t2 l2))
//! s2 | .    ~ IG(a0 + (n + p)/2, b0 + (|y - X beta|^2 + sum beta_b^2 / (t2 l2_b)) / 2)
//! l2_b | .  ~ IG(1, 1/nu_b + beta_b^2 / (2 t2 s2))
//! t2 | .    ~ IG((p + 1)/2, 1/xi + sum beta_b^2 / (2 l2_b s2))
//! nu_b | .  ~ IG(1, 1 + 1/l2_b)
//! xi | .    ~ IG(1, 1 + 1/t2)
//! ```
//!
//! When `p > n` the coefficient draw uses the data-augmentation sampler, which
//! only factorizes an `n x n` system.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};

use crate::data_io::NodeView;
use crate::error::{Error, Result};
use crate::linalg;
use crate::rng::{self, StreamRng};

const SCALE_FLOOR: f64 = 1e-100;
const SCALE_CEIL: f64 = 1e100;

/// Which coefficient sampler to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BetaRoute {
    /// Fast sampler exactly when the number of coefficients exceeds `n`.
    #[default]
    Auto,
    Direct,
    Fast,
}

impl BetaRoute {
    fn use_fast(self, n: usize, n_coef: usize) -> bool {
        match self {
            BetaRoute::Auto => n_coef > n,
            BetaRoute::Direct => false,
            BetaRoute::Fast => true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HsConfig {
    /// Retained draws after burn-in.
    pub n_iter: usize,
    pub burn_in: usize,
    pub seed: u64,
    pub sigma2_prior_shape: f64,
    pub sigma2_prior_rate: f64,
    pub route: BetaRoute,
    pub keep_draws: bool,
}

impl Default for HsConfig {
    fn default() -> Self {
        Self {
            n_iter: 2000,
            burn_in: 500,
            seed: 0,
            sigma2_prior_shape: 0.1,
            sigma2_prior_rate: 0.1,
            route: BetaRoute::Auto,
            keep_draws: false,
        }
    }
}

impl HsConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_iter == 0 {
            return Err(Error::Config("n_iter must be at least 1".into()));
        }
        if !(self.sigma2_prior_shape > 0.0 && self.sigma2_prior_rate > 0.0) {
            return Err(Error::Config(
                "residual variance prior shape and rate must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HsState {
    /// Intercept in slot 0, then one slot per predictor.
    pub beta: DVector<f64>,
    pub lambda2: DVector<f64>,
    pub tau2: f64,
    pub sigma2: f64,
    pub nu: DVector<f64>,
    pub xi_aux: f64,
}

impl HsState {
    /// `beta = 0` with every scale and auxiliary set to one.
    pub fn initial(n_coef: usize) -> Self {
        Self {
            beta: DVector::zeros(n_coef),
            lambda2: DVector::from_element(n_coef, 1.0),
            tau2: 1.0,
            sigma2: 1.0,
            nu: DVector::from_element(n_coef, 1.0),
            xi_aux: 1.0,
        }
    }

    /// Prior variances `t2 * l2_b` (the diagonal of `Lambda*`).
    pub fn prior_variances(&self) -> Vec<f64> {
        self.lambda2.iter().map(|l2| l2 * self.tau2).collect()
    }

    pub fn scales_positive(&self) -> bool {
        self.tau2 > 0.0
            && self.sigma2 > 0.0
            && self.xi_aux > 0.0
            && self.lambda2.iter().all(|&v| v > 0.0)
            && self.nu.iter().all(|&v| v > 0.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HsPosterior {
    pub beta_mean: DVector<f64>,
    /// `n_iter x p` retained draws when requested.
    pub beta_draws: Option<DMatrix<f64>>,
}

/// Sufficient statistics reused at every iteration.
#[derive(Debug, Clone)]
pub struct RegressionCache<'a> {
    view: &'a NodeView,
    xtx: DMatrix<f64>,
    xty: DVector<f64>,
}

impl<'a> RegressionCache<'a> {
    pub fn new(view: &'a NodeView) -> Self {
        let x = view.design();
        Self {
            view,
            xtx: x.tr_mul(x),
            xty: x.tr_mul(view.response()),
        }
    }

    pub fn view(&self) -> &NodeView {
        self.view
    }

    pub fn n(&self) -> usize {
        self.view.n()
    }

    pub fn n_coef(&self) -> usize {
        self.view.n_coef()
    }

    pub fn residual_ss(&self, beta: &DVector<f64>) -> f64 {
        (self.view.response() - self.view.design() * beta).norm_squared()
    }
}

/// Inverse-gamma draw `IG(shape, scale)`, clamped to a finite positive range.
pub(crate) fn inv_gamma<R: Rng + ?Sized>(shape: f64, scale: f64, rng: &mut R) -> f64 {
    let g: f64 = Gamma::new(shape, 1.0)
        .expect("inverse-gamma shape must be positive")
        .sample(rng);
    (scale / g).clamp(SCALE_FLOOR, SCALE_CEIL)
}

fn standard_normals<R: Rng + ?Sized>(len: usize, rng: &mut R) -> DVector<f64> {
    DVector::from_iterator(len, (0..len).map(|_| StandardNormal.sample(rng)))
}

/// Draws `beta ~ N(A^-1 X'y, s2 A^-1)` with `A = X'X + diag(1 / prior_var)` by
/// factorizing the `p x p` matrix `A`.
pub fn sample_beta_direct<R: Rng + ?Sized>(
    cache: &RegressionCache<'_>,
    prior_var: &[f64],
    sigma2: f64,
    rng: &mut R,
) -> Result<DVector<f64>> {
    let mut a = cache.xtx.clone();
    for (j, v) in prior_var.iter().enumerate() {
        a[(j, j)] += 1.0 / v;
    }
    let chol = linalg::cholesky(a, "coefficient precision")?;
    let mean = chol.solve(&cache.xty);
    let z = standard_normals(prior_var.len(), rng);
    let noise = chol
        .l_dirty()
        .tr_solve_lower_triangular(&z)
        .ok_or_else(|| Error::NotPositiveDefinite {
            context: "coefficient precision factor".into(),
        })?;
    Ok(mean + noise * sigma2.sqrt())
}

/// Same target as [`sample_beta_direct`] at `O(n^2 p)` cost: draw
/// `u ~ N(0, D)` and `d ~ N(0, I_n)`, solve `(Phi D Phi' + I) w = alpha - (Phi u + d)`
/// and return `u + D Phi' w`, with `D = s2 diag(prior_var)`, `Phi = X / s`,
/// `alpha = y / s`.
pub fn sample_beta_fast<R: Rng + ?Sized>(
    view: &NodeView,
    prior_var: &[f64],
    sigma2: f64,
    rng: &mut R,
) -> Result<DVector<f64>> {
    let x = view.design();
    let (n, p) = x.shape();
    let sigma = sigma2.sqrt();
    let u = DVector::from_iterator(
        p,
        prior_var.iter().map(|v| {
            let z: f64 = StandardNormal.sample(rng);
            z * (sigma2 * v).sqrt()
        }),
    );
    let delta = standard_normals(n, rng);
    let mut scaled = x.clone();
    for (j, mut col) in scaled.column_iter_mut().enumerate() {
        col *= prior_var[j].sqrt();
    }
    let mut m = &scaled * scaled.transpose();
    for i in 0..n {
        m[(i, i)] += 1.0;
    }
    let v = (x * &u) / sigma + delta;
    let rhs = view.response() / sigma - v;
    let w = linalg::cholesky(m, "augmented n x n system")?.solve(&rhs);
    let xtw = x.tr_mul(&w);
    let correction = DVector::from_iterator(
        p,
        xtw.iter().zip(prior_var).map(|(g, v)| sigma * v * g),
    );
    Ok(u + correction)
}

/// One full Gibbs sweep. `iteration` is only used to label numerical failures.
pub fn gibbs_step<R: Rng + ?Sized>(
    state: &HsState,
    cache: &RegressionCache<'_>,
    config: &HsConfig,
    rng: &mut R,
    iteration: usize,
) -> Result<HsState> {
    let n = cache.n();
    let p = cache.n_coef();
    let numerical = |e: Error| Error::Numerical {
        iteration,
        message: e.to_string(),
    };

    let prior_var = state.prior_variances();
    let beta = if config.route.use_fast(n, p) {
        sample_beta_fast(cache.view(), &prior_var, state.sigma2, rng)
    } else {
        sample_beta_direct(cache, &prior_var, state.sigma2, rng)
    }
    .map_err(numerical)?;
    if beta.iter().any(|b| !b.is_finite()) {
        return Err(Error::Numerical {
            iteration,
            message: "non-finite coefficient draw".into(),
        });
    }

    let prior_quad: f64 = beta
        .iter()
        .zip(&prior_var)
        .map(|(b, v)| b * b / v)
        .sum();
    let rss = cache.residual_ss(&beta);
    let sigma2 = inv_gamma(
        config.sigma2_prior_shape + 0.5 * (n + p) as f64,
        config.sigma2_prior_rate + 0.5 * (rss + prior_quad),
        rng,
    );

    let tau2_old = state.tau2;
    let lambda2 = DVector::from_iterator(
        p,
        (0..p).map(|b| {
            let rate = 1.0 / state.nu[b] + beta[b] * beta[b] / (2.0 * tau2_old * sigma2);
            inv_gamma(1.0, rate, rng)
        }),
    );

    let local_quad: f64 = beta
        .iter()
        .zip(lambda2.iter())
        .map(|(b, l2)| b * b / l2)
        .sum();
    let tau2 = inv_gamma(
        0.5 * (p + 1) as f64,
        1.0 / state.xi_aux + local_quad / (2.0 * sigma2),
        rng,
    );

    let nu = DVector::from_iterator(
        p,
        lambda2.iter().map(|l2| inv_gamma(1.0, 1.0 + 1.0 / l2, rng)),
    );
    let xi_aux = inv_gamma(1.0, 1.0 + 1.0 / tau2, rng);

    Ok(HsState {
        beta,
        lambda2,
        tau2,
        sigma2,
        nu,
        xi_aux,
    })
}

/// Runs `burn_in + n_iter` sweeps from [`HsState::initial`] and averages the
/// last `n_iter` coefficient draws. The random stream is `config.seed`.
pub fn run_chain(view: &NodeView, config: &HsConfig) -> Result<HsPosterior> {
    config.validate()?;
    let mut rng = rng::seeded(config.seed);
    run_chain_with(view, config, &mut rng)
}

pub fn run_chain_with(
    view: &NodeView,
    config: &HsConfig,
    rng: &mut StreamRng,
) -> Result<HsPosterior> {
    config.validate()?;
    let cache = RegressionCache::new(view);
    let p = view.n_coef();
    let mut state = HsState::initial(p);
    let mut sum = DVector::zeros(p);
    let mut draws = config
        .keep_draws
        .then(|| DMatrix::zeros(config.n_iter, p));
    for it in 0..config.burn_in + config.n_iter {
        state = gibbs_step(&state, &cache, config, rng, it)?;
        if it >= config.burn_in {
            sum += &state.beta;
            if let Some(d) = draws.as_mut() {
                d.set_row(it - config.burn_in, &state.beta.transpose());
            }
        }
    }
    Ok(HsPosterior {
        beta_mean: sum / config.n_iter as f64,
        beta_draws: draws,
    })
}

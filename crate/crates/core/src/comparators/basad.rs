//! Spike-and-slab node-wise regression with shrinking and diffusing normal
//! priors, alternating `beta | gamma` and `gamma | beta` Gibbs updates.
//!
//! ```text
//! beta_b | s2, gamma_b ~ N(0, tau_{gamma_b}^2 s2),   gamma_b ~ Bern(q_n)
//! s2 ~ IG(0.1, 0.1),  intercept always in the slab
//! ```

use nalgebra::DVector;
use rand::Rng;
use statrs::function::gamma::ln_gamma;

use crate::data_io::NodeView;
use crate::error::{Error, Result};
use crate::hs_sampler::{inv_gamma, sample_beta_direct, sample_beta_fast, RegressionCache};
use crate::rng;
use crate::subho_select::GammaVector;

const TAIL_TARGET: f64 = 0.1;

#[derive(Debug, Clone, PartialEq)]
pub struct BasadConfig {
    pub tau0_sq: f64,
    pub tau1_sq: f64,
    pub q_n: f64,
    pub k_cap: usize,
    pub sigma2_prior_shape: f64,
    pub sigma2_prior_rate: f64,
    pub n_iter: usize,
    pub burn_in: usize,
    pub seed: u64,
}

impl BasadConfig {
    /// Default hyperparameters for one node regression with `p` nodes:
    /// `tau0^2 = s^2 / (10 n)`, `tau1^2 = s^2 max(p^2.1 / (100 n), ln n)` where
    /// `s^2` is the sample variance of the response, and `q_n` puts 10% prior
    /// mass on models larger than `K = max(10, ceil(ln n))`.
    ///
    /// With fewer than `K + 1` candidate predictors the cap is lowered to
    /// `p - 2` so the tail constraint stays solvable.
    pub fn for_node(view: &NodeView, p: usize, n_iter: usize, burn_in: usize, seed: u64) -> Result<Self> {
        let n = view.n();
        let y = view.response();
        let mean = y.mean();
        let s2 = y.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        let nf = n as f64;
        let k_cap = ((nf.ln().ceil()) as usize).max(10);
        let trials = p - 1;
        let solvable_cap = k_cap.min(trials.saturating_sub(1));
        Ok(Self {
            tau0_sq: s2 / (10.0 * nf),
            tau1_sq: s2 * ((p as f64).powf(2.1) / (100.0 * nf)).max(nf.ln()),
            q_n: basad_solve_qn(p, solvable_cap)?,
            k_cap,
            sigma2_prior_shape: 0.1,
            sigma2_prior_rate: 0.1,
            n_iter,
            burn_in,
            seed,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau0_sq > 0.0 && self.tau0_sq <= self.tau1_sq) {
            return Err(Error::Config("need 0 < tau0^2 <= tau1^2".into()));
        }
        if !(self.q_n > 0.0 && self.q_n < 1.0) {
            return Err(Error::Config("q_n must lie in (0, 1)".into()));
        }
        if self.n_iter == 0 {
            return Err(Error::Config("n_iter must be at least 1".into()));
        }
        if !(self.sigma2_prior_shape > 0.0 && self.sigma2_prior_rate > 0.0) {
            return Err(Error::Config("residual variance prior must be proper".into()));
        }
        Ok(())
    }
}

/// `P(Binomial(trials, q) > cap)`, summed in log space.
pub fn binomial_upper_tail(trials: usize, q: f64, cap: usize) -> f64 {
    if cap >= trials {
        return 0.0;
    }
    let nf = trials as f64;
    let (lq, l1q) = (q.ln(), (-q).ln_1p());
    let ln_n1 = ln_gamma(nf + 1.0);
    (cap + 1..=trials)
        .map(|j| {
            let jf = j as f64;
            (ln_n1 - ln_gamma(jf + 1.0) - ln_gamma(nf - jf + 1.0) + jf * lq + (nf - jf) * l1q).exp()
        })
        .sum()
}

/// Inclusion probability `q` with `P(Binomial(p - 1, q) > cap) = 0.1`, by bisection.
pub fn basad_solve_qn(p: usize, cap: usize) -> Result<f64> {
    let trials = p.saturating_sub(1);
    if cap >= trials {
        return Err(Error::NoRoot { cap, trials });
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if binomial_upper_tail(trials, mid, cap) < TAIL_TARGET {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Debug, Clone, PartialEq)]
pub struct BasadPosterior {
    /// Intercept first, then one entry per predictor.
    pub beta_mean: DVector<f64>,
    /// Fraction of retained draws with each predictor in the slab.
    pub inclusion_probs: Vec<f64>,
}

/// Posterior log-odds of slab membership for one coefficient.
fn slab_log_odds(beta: f64, sigma2: f64, config: &BasadConfig) -> f64 {
    let prior = (config.q_n / (1.0 - config.q_n)).ln();
    prior - 0.5 * (config.tau1_sq / config.tau0_sq).ln()
        - 0.5 * beta * beta / sigma2 * (1.0 / config.tau1_sq - 1.0 / config.tau0_sq)
}

pub fn basad_chain(view: &NodeView, config: &BasadConfig) -> Result<BasadPosterior> {
    config.validate()?;
    let cache = RegressionCache::new(view);
    let (n, p) = (view.n(), view.n_coef());
    let fast = p > n;
    let mut rng = rng::seeded(config.seed);

    let mut gamma = vec![false; p - 1];
    let mut sigma2 = 1.0;
    let mut beta_sum = DVector::zeros(p);
    let mut incl = vec![0usize; p - 1];
    let mut prior_var = vec![config.tau1_sq; p];

    for it in 0..config.burn_in + config.n_iter {
        for (v, g) in prior_var[1..].iter_mut().zip(&gamma) {
            *v = if *g { config.tau1_sq } else { config.tau0_sq };
        }
        let beta = if fast {
            sample_beta_fast(view, &prior_var, sigma2, &mut rng)
        } else {
            sample_beta_direct(&cache, &prior_var, sigma2, &mut rng)
        }
        .map_err(|e| Error::Numerical {
            iteration: it,
            message: e.to_string(),
        })?;

        let quad: f64 = beta.iter().zip(&prior_var).map(|(b, v)| b * b / v).sum();
        sigma2 = inv_gamma(
            config.sigma2_prior_shape + 0.5 * (n + p) as f64,
            config.sigma2_prior_rate + 0.5 * (cache.residual_ss(&beta) + quad),
            &mut rng,
        );

        for (b, g) in gamma.iter_mut().enumerate() {
            let lo = slab_log_odds(beta[b + 1], sigma2, config);
            let prob = 1.0 / (1.0 + (-lo).exp());
            *g = rng.random::<f64>() < prob;
        }

        if it >= config.burn_in {
            beta_sum += &beta;
            for (c, g) in incl.iter_mut().zip(&gamma) {
                *c += usize::from(*g);
            }
        }
    }
    let draws = config.n_iter as f64;
    Ok(BasadPosterior {
        beta_mean: beta_sum / draws,
        inclusion_probs: incl.iter().map(|&c| c as f64 / draws).collect(),
    })
}

/// Median probability model: keep predictors with inclusion probability above 1/2.
pub fn basad_select(inclusion_probs: &[f64]) -> GammaVector {
    GammaVector(inclusion_probs.iter().map(|&q| q > 0.5).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;
    use rand_distr::{Distribution, StandardNormal};
    use statrs::function::beta::beta_reg;

    #[test]
    fn impossible_cap_is_an_error() {
        assert!(matches!(basad_solve_qn(11, 10), Err(Error::NoRoot { .. })));
    }

    #[test]
    fn tail_matches_incomplete_beta() {
        // P(X > K) = I_q(K + 1, N - K)
        for &(trials, cap, q) in &[(74usize, 10usize, 0.08), (10, 3, 0.4), (149, 10, 0.03)] {
            let a = binomial_upper_tail(trials, q, cap);
            let b = beta_reg((cap + 1) as f64, (trials - cap) as f64, q);
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn solved_q_hits_target_and_is_monotone() {
        let q = basad_solve_qn(75, 10).unwrap();
        assert!((beta_reg(11.0, 64.0, q) - 0.1).abs() <= 1e-6);
        let q_bigger = basad_solve_qn(75, 12).unwrap();
        assert!(q_bigger > q);
    }

    #[test]
    fn mpm_threshold() {
        assert_eq!(basad_select(&[0.9, 0.1]).0, vec![true, false]);
        assert_eq!(basad_select(&[0.5]).0, vec![false]);
        assert_eq!(basad_select(&[0.0, 0.0, 0.0]).size(), 0);
    }

    #[test]
    fn equal_variances_give_prior_odds() {
        let cfg = BasadConfig {
            tau0_sq: 0.3,
            tau1_sq: 0.3,
            q_n: 0.2,
            k_cap: 10,
            sigma2_prior_shape: 0.1,
            sigma2_prior_rate: 0.1,
            n_iter: 10,
            burn_in: 0,
            seed: 0,
        };
        for beta in [-3.0, 0.0, 0.01, 5.0] {
            let lo = slab_log_odds(beta, 0.7, &cfg);
            assert!((lo - (0.2f64 / 0.8).ln()).abs() < 1e-14);
        }
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let mut r = rng::seeded(1);
        let x = DMatrix::from_fn(30, 3, |_, _| StandardNormal.sample(&mut r));
        let y = DVector::from_fn(30, |i, _| x[(i, 1)] + Distribution::<f64>::sample(&StandardNormal, &mut r));
        let view = NodeView::from_parts(y, &x).unwrap();
        let cfg = BasadConfig::for_node(&view, 4, 200, 50, 3).unwrap();
        assert_eq!(basad_chain(&view, &cfg).unwrap(), basad_chain(&view, &cfg).unwrap());
    }
}

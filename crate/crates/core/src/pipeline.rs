//! Parallel node-wise estimation and assembly into graph estimates.
//!
//! Each node's regression is sequential and seeded from
//! `(master_seed, node_index)`, so the merged result does not depend on the
//! number of workers.

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::comparators::{basad_chain, basad_select, iw_graph, iw_point_estimate, BasadConfig, IwConfig};
use crate::data_io::{node_view, StandardizedDataset};
use crate::error::{Error, Result};
use crate::graph::{assemble_psi, symmetrize, GraphEstimate, NeighborhoodCollection, PartialCorrEstimate, Rule};
use crate::hs_sampler::{run_chain, HsConfig};
use crate::rng::{derive_seed, Domain};
use crate::subho_select::{default_max_size, rank_predictors, select_model, GammaVector, SelectionHyper};

#[derive(Debug, Clone, PartialEq)]
pub struct SubhoSettings {
    /// `seed` is ignored; node chains are seeded from the master seed.
    pub hs: HsConfig,
    pub hyper: SelectionHyper,
    /// `None` uses [`default_max_size`].
    pub max_size: Option<usize>,
}

impl Default for SubhoSettings {
    fn default() -> Self {
        Self {
            hs: HsConfig::default(),
            hyper: SelectionHyper::default(),
            max_size: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BasadSettings {
    pub n_iter: usize,
    pub burn_in: usize,
}

impl Default for BasadSettings {
    fn default() -> Self {
        Self {
            n_iter: 2000,
            burn_in: 500,
        }
    }
}

/// Node-wise regression method.
#[derive(Debug, Clone, PartialEq)]
pub enum NodeMethod {
    Subho(SubhoSettings),
    Basad(BasadSettings),
}

/// Result of one node regression in original column indexing.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeFit {
    pub node: usize,
    /// Length `p`; the entry for the node itself is 0.
    pub beta: Vec<f64>,
    /// Length `p`; the entry for the node itself is false.
    pub gamma: Vec<bool>,
}

fn scatter(node: usize, p: usize, predictors: &[usize], beta_pred: &[f64], gamma: &GammaVector) -> NodeFit {
    let mut beta = vec![0.0; p];
    let mut incl = vec![false; p];
    for (j, &b) in predictors.iter().enumerate() {
        beta[b] = beta_pred[j];
        incl[b] = gamma.0[j];
    }
    NodeFit {
        node,
        beta,
        gamma: incl,
    }
}

pub fn fit_node(data: &StandardizedDataset, a: usize, method: &NodeMethod, master_seed: u64) -> Result<NodeFit> {
    let view = node_view(data, a)?;
    let seed = derive_seed(master_seed, Domain::Node, a as u64);
    let p = data.p();
    match method {
        NodeMethod::Subho(s) => {
            let hs = HsConfig {
                seed,
                ..s.hs.clone()
            };
            let post = run_chain(&view, &hs)?;
            let cap = s.max_size.unwrap_or_else(|| default_max_size(data.n(), p));
            let space = rank_predictors(&post.beta_mean, cap);
            let gamma = select_model(&view, &space, &s.hyper)?;
            Ok(scatter(a, p, view.predictors(), &post.beta_mean.as_slice()[1..], &gamma))
        }
        NodeMethod::Basad(s) => {
            let cfg = BasadConfig::for_node(&view, p, s.n_iter, s.burn_in, seed)?;
            let post = basad_chain(&view, &cfg)?;
            let gamma = basad_select(&post.inclusion_probs);
            Ok(scatter(a, p, view.predictors(), &post.beta_mean.as_slice()[1..], &gamma))
        }
    }
}

fn with_workers<T: Send>(workers: usize, job: impl FnOnce() -> T + Send) -> Result<T> {
    if workers == 0 {
        return Err(Error::Config("worker count must be at least 1".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(job))
}

/// Runs every node regression on a pool of `workers` threads and merges the
/// results by node index. The first failing node (by index) aborts the fit.
pub fn fit_neighborhoods(
    data: &StandardizedDataset,
    method: &NodeMethod,
    master_seed: u64,
    workers: usize,
) -> Result<NeighborhoodCollection> {
    let p = data.p();
    let fits: Vec<Result<NodeFit>> = with_workers(workers, || {
        (0..p)
            .into_par_iter()
            .map(|a| fit_node(data, a, method, master_seed))
            .collect()
    })?;
    let mut beta_all = DMatrix::zeros(p, p);
    let mut gamma_all = DMatrix::from_element(p, p, false);
    for (a, fit) in fits.into_iter().enumerate() {
        let fit = fit.map_err(|e| Error::Node {
            node: a,
            source: Box::new(e),
        })?;
        for b in 0..p {
            beta_all[(a, b)] = fit.beta[b];
            gamma_all[(a, b)] = fit.gamma[b];
        }
    }
    NeighborhoodCollection::new(beta_all, gamma_all)
}

/// Which estimator to run end to end.
#[derive(Debug, Clone, PartialEq)]
pub enum Method {
    Nodewise(NodeMethod),
    InverseWishart(IwConfig),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitOutput {
    /// Present for node-wise methods.
    pub collection: Option<NeighborhoodCollection>,
    pub graph: GraphEstimate,
    pub psi: PartialCorrEstimate,
}

/// Fits the graph and partial correlations. `rule` is ignored for the
/// inverse-Wishart estimator, whose draw seed is taken from `master_seed`.
pub fn fit_graph(
    data: &StandardizedDataset,
    method: &Method,
    rule: Rule,
    master_seed: u64,
    workers: usize,
) -> Result<FitOutput> {
    match method {
        Method::Nodewise(m) => {
            let collection = fit_neighborhoods(data, m, master_seed, workers)?;
            Ok(FitOutput {
                graph: symmetrize(&collection, rule),
                psi: assemble_psi(&collection),
                collection: Some(collection),
            })
        }
        Method::InverseWishart(cfg) => {
            let cfg = IwConfig {
                seed: master_seed,
                ..cfg.clone()
            };
            let (graph, psi) = with_workers(workers, || {
                Ok::<_, Error>((iw_graph(data, &cfg)?, iw_point_estimate(data, &cfg)?))
            })??;
            Ok(FitOutput {
                collection: None,
                graph,
                psi,
            })
        }
    }
}

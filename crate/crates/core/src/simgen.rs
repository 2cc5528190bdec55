//! Ground-truth covariance structures and multivariate-normal datasets for
//! simulation studies.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::data_io::RawDataset;
use crate::error::{Error, Result};
use crate::graph::{GraphEstimate, PartialCorrEstimate};
use crate::linalg;
use crate::rng::{self, Domain};
use crate::wishart::Wishart;

const COMPLETION_TOL: f64 = 1e-8;
const MAX_SWEEPS: usize = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub enum Design {
    /// `Sigma_ij = rho^|i - j|`.
    Ar1 { rho: f64 },
    /// Random Erdos-Renyi graph, then a G-Wishart precision with identity scale.
    GWishart { edge_prob: f64, dof: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub design: Design,
    pub n: usize,
    pub p: usize,
    pub replicates: usize,
    pub seed: u64,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        if self.p < 2 {
            return Err(Error::Config(format!("p must be at least 2, got {}", self.p)));
        }
        if self.n < 2 {
            return Err(Error::Config(format!("n must be at least 2, got {}", self.n)));
        }
        if self.replicates == 0 {
            return Err(Error::Config("replicates must be at least 1".into()));
        }
        match self.design {
            Design::Ar1 { rho } if !(rho > 0.0 && rho < 1.0) => {
                Err(Error::Config(format!("rho must lie in (0, 1), got {rho}")))
            }
            Design::GWishart { edge_prob, .. } if !(edge_prob > 0.0 && edge_prob < 1.0) => Err(
                Error::Config(format!("edge probability must lie in (0, 1), got {edge_prob}")),
            ),
            Design::GWishart { dof, .. } if !(dof > 2.0) => {
                Err(Error::Config(format!("G-Wishart dof must exceed 2, got {dof}")))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    pub sigma: DMatrix<f64>,
    pub omega: DMatrix<f64>,
    pub psi: PartialCorrEstimate,
    pub graph: GraphEstimate,
}

impl GroundTruth {
    fn from_parts(sigma: DMatrix<f64>, omega: DMatrix<f64>) -> Self {
        Self {
            psi: PartialCorrEstimate::from_precision(&omega),
            graph: GraphEstimate::from_support(&omega),
            sigma,
            omega,
        }
    }
}

/// AR(1) covariance with its exact tridiagonal inverse.
pub fn ar1_truth(p: usize, rho: f64) -> Result<GroundTruth> {
    if !(rho > 0.0 && rho < 1.0) || p < 2 {
        return Err(Error::Config(format!("need p >= 2 and 0 < rho < 1 (p={p}, rho={rho})")));
    }
    let sigma = DMatrix::from_fn(p, p, |i, j| rho.powi(i.abs_diff(j) as i32));
    let k = 1.0 / (1.0 - rho * rho);
    let omega = DMatrix::from_fn(p, p, |i, j| match i.abs_diff(j) {
        0 if i == 0 || i == p - 1 => k,
        0 => k * (1.0 + rho * rho),
        1 => -k * rho,
        _ => 0.0,
    });
    Ok(GroundTruth::from_parts(sigma, omega))
}

/// Independent Bernoulli(`edge_prob`) indicators over the upper triangle, row by row.
pub fn random_graph<R: Rng + ?Sized>(p: usize, edge_prob: f64, rng: &mut R) -> GraphEstimate {
    let mut edges = Vec::new();
    for a in 0..p {
        for b in a + 1..p {
            if rng.random::<f64>() < edge_prob {
                edges.push((a, b));
            }
        }
    }
    GraphEstimate::from_edges(p, edges).expect("indices are in range")
}

/// Draws `Omega ~ W_G(b, D)` with density proportional to
/// `|Omega|^((b - 2) / 2) exp(-tr(D Omega) / 2)` on the cone of positive-definite
/// matrices with zeros off the graph.
///
/// An unconstrained `Wishart(b + p - 1, D^-1)` draw is inverted and completed
/// node by node until the zero pattern of its inverse matches the graph; the
/// result is an exact G-Wishart draw. On the complete graph no completion
/// step is needed.
pub fn gwishart_sample<R: Rng + ?Sized>(
    graph: &GraphEstimate,
    b: f64,
    d: &DMatrix<f64>,
    rng: &mut R,
) -> Result<DMatrix<f64>> {
    let p = graph.p();
    if d.shape() != (p, p) {
        return Err(Error::Dimension(format!("scale is {:?}, graph has {p} nodes", d.shape())));
    }
    if !(b > 2.0) {
        return Err(Error::Config(format!("G-Wishart dof must exceed 2, got {b}")));
    }
    let d_inv = linalg::spd_inverse(d, "G-Wishart scale")?;
    let (_, sigma) = Wishart::new(b + p as f64 - 1.0, &d_inv)?.sample_with_inverse(rng)?;

    let neighbors: Vec<Vec<usize>> = (0..p)
        .map(|j| (0..p).filter(|&k| graph.has_edge(j, k)).collect())
        .collect();
    let mut w = sigma.clone();
    if graph.edge_count() < p * (p - 1) / 2 {
        let mut sweeps = 0;
        loop {
            let previous = w.clone();
            for j in 0..p {
                let nb = &neighbors[j];
                let coef = if nb.is_empty() {
                    DVector::zeros(0)
                } else {
                    let w_nn = DMatrix::from_fn(nb.len(), nb.len(), |r, c| w[(nb[r], nb[c])]);
                    let s_nj = DVector::from_fn(nb.len(), |r, _| sigma[(nb[r], j)]);
                    linalg::cholesky(w_nn, "G-Wishart completion block")?.solve(&s_nj)
                };
                for i in (0..p).filter(|&i| i != j) {
                    let v: f64 = nb.iter().zip(coef.iter()).map(|(&k, c)| w[(i, k)] * c).sum();
                    w[(i, j)] = v;
                    w[(j, i)] = v;
                }
            }
            sweeps += 1;
            let change = (&w - &previous).amax();
            if change < COMPLETION_TOL {
                break;
            }
            if sweeps >= MAX_SWEEPS || !change.is_finite() {
                return Err(Error::NoConvergence { sweeps, change });
            }
        }
    }
    let mut omega = linalg::spd_inverse(&w, "completed covariance")?;
    for i in 0..p {
        for j in 0..p {
            if i != j && !graph.has_edge(i, j) {
                omega[(i, j)] = 0.0;
            }
        }
    }
    linalg::cholesky(omega.clone(), "G-Wishart draw")?;
    Ok(omega)
}

/// Rescales `Omega` by diagonal congruence so that `Omega^-1` has unit diagonal.
pub fn rescale_unit_diag(omega: &DMatrix<f64>) -> Result<GroundTruth> {
    let sigma = linalg::spd_inverse(omega, "precision to rescale")?;
    let p = omega.nrows();
    let s: Vec<f64> = (0..p).map(|a| sigma[(a, a)].sqrt()).collect();
    let omega_r = DMatrix::from_fn(p, p, |a, b| {
        let v = if a <= b { omega[(a, b)] } else { omega[(b, a)] };
        s[a] * v * s[b]
    });
    let mut sigma_r = DMatrix::from_fn(p, p, |a, b| {
        let v = if a <= b { sigma[(a, b)] } else { sigma[(b, a)] };
        v / (s[a] * s[b])
    });
    for a in 0..p {
        sigma_r[(a, a)] = 1.0;
    }
    Ok(GroundTruth::from_parts(sigma_r, omega_r))
}

/// `n` i.i.d. rows from `N(0, Sigma)` as `L z` with `Sigma = L L'`.
pub fn mvn_sample<R: Rng + ?Sized>(n: usize, truth: &GroundTruth, rng: &mut R) -> Result<DMatrix<f64>> {
    let l = linalg::cholesky(truth.sigma.clone(), "covariance")?.l();
    let p = l.nrows();
    let mut out = DMatrix::zeros(n, p);
    let mut z = DVector::zeros(p);
    for i in 0..n {
        for v in z.iter_mut() {
            *v = StandardNormal.sample(rng);
        }
        out.set_row(i, &(&l * &z).transpose());
    }
    Ok(out)
}

/// Truth and dataset for replicate `r`, drawn from stream `(scenario.seed, r)`.
pub fn generate_replicate(scenario: &Scenario, r: usize) -> Result<(GroundTruth, RawDataset)> {
    scenario.validate()?;
    let mut rng = rng::stream(scenario.seed, Domain::Replicate, r as u64);
    let truth = match scenario.design {
        Design::Ar1 { rho } => ar1_truth(scenario.p, rho)?,
        Design::GWishart { edge_prob, dof } => {
            let graph = random_graph(scenario.p, edge_prob, &mut rng);
            let omega = gwishart_sample(&graph, dof, &DMatrix::identity(scenario.p, scenario.p), &mut rng)?;
            rescale_unit_diag(&omega)?
        }
    };
    let data = RawDataset::with_default_names(mvn_sample(scenario.n, &truth, &mut rng)?)?;
    Ok((truth, data))
}

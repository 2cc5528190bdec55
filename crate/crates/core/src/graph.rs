//! Combining node-wise fits into a graph, a partial-correlation matrix and
//! connectivity rankings.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg;

/// Per-node results gathered into `p x p` matrices. Row `a` holds node `a`'s
/// regression: entry `(a, b)` is the coefficient / inclusion of predictor `b`.
#[derive(Debug, Clone, PartialEq)]
pub struct NeighborhoodCollection {
    beta_all: DMatrix<f64>,
    gamma_all: DMatrix<bool>,
}

impl NeighborhoodCollection {
    pub fn new(mut beta_all: DMatrix<f64>, mut gamma_all: DMatrix<bool>) -> Result<Self> {
        if !beta_all.is_square() || beta_all.shape() != gamma_all.shape() {
            return Err(Error::Dimension(format!(
                "coefficients {:?} and indicators {:?} must be the same square shape",
                beta_all.shape(),
                gamma_all.shape()
            )));
        }
        for a in 0..beta_all.nrows() {
            beta_all[(a, a)] = 0.0;
            gamma_all[(a, a)] = false;
        }
        Ok(Self {
            beta_all,
            gamma_all,
        })
    }

    pub fn p(&self) -> usize {
        self.beta_all.nrows()
    }

    pub fn beta_all(&self) -> &DMatrix<f64> {
        &self.beta_all
    }

    pub fn gamma_all(&self) -> &DMatrix<bool> {
        &self.gamma_all
    }
}

/// Undirected graph as a symmetric boolean adjacency with an empty diagonal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphEstimate {
    adjacency: DMatrix<bool>,
}

impl GraphEstimate {
    pub fn empty(p: usize) -> Self {
        Self {
            adjacency: DMatrix::from_element(p, p, false),
        }
    }

    pub fn from_edges(p: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut g = Self::empty(p);
        for (a, b) in edges {
            if a >= p || b >= p {
                return Err(Error::OutOfRange {
                    what: "nodes",
                    index: a.max(b),
                    len: p,
                });
            }
            if a != b {
                g.adjacency[(a, b)] = true;
                g.adjacency[(b, a)] = true;
            }
        }
        Ok(g)
    }

    /// Nonzero off-diagonal pattern of a matrix.
    pub fn from_support(m: &DMatrix<f64>) -> Self {
        let p = m.nrows();
        Self {
            adjacency: DMatrix::from_fn(p, p, |a, b| a != b && (m[(a, b)] != 0.0 || m[(b, a)] != 0.0)),
        }
    }

    pub fn p(&self) -> usize {
        self.adjacency.nrows()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adjacency[(a, b)]
    }

    pub fn adjacency(&self) -> &DMatrix<bool> {
        &self.adjacency
    }

    /// Edges `(a, b)` with `a < b`, in row-major order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let p = self.p();
        (0..p)
            .flat_map(|a| (a + 1..p).map(move |b| (a, b)))
            .filter(|&(a, b)| self.adjacency[(a, b)])
            .collect()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().filter(|&&e| e).count() / 2
    }

    pub fn degree(&self, a: usize) -> usize {
        self.adjacency.row(a).iter().filter(|&&e| e).count()
    }

    pub fn is_subgraph_of(&self, other: &GraphEstimate) -> bool {
        self.p() == other.p()
            && self
                .adjacency
                .iter()
                .zip(other.adjacency.iter())
                .all(|(a, b)| !*a || *b)
    }
}

/// Symmetric matrix of partial correlations with unit diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialCorrEstimate {
    psi: DMatrix<f64>,
}

impl PartialCorrEstimate {
    /// Checks symmetry, unit diagonal and entries within `[-1, 1]`.
    pub fn new(psi: DMatrix<f64>) -> Result<Self> {
        let p = psi.nrows();
        if !psi.is_square() {
            return Err(Error::Dimension("partial correlations must be square".into()));
        }
        for a in 0..p {
            if psi[(a, a)] != 1.0 {
                return Err(Error::Dimension(format!("diagonal entry {a} is not 1")));
            }
            for b in 0..a {
                let v = psi[(a, b)];
                if v != psi[(b, a)] || !(v.abs() <= 1.0) {
                    return Err(Error::Dimension(format!(
                        "entry ({a}, {b}) is asymmetric or outside [-1, 1]"
                    )));
                }
            }
        }
        Ok(Self { psi })
    }

    /// Rescales a precision matrix, forcing exact symmetry from the upper triangle.
    pub fn from_precision(omega: &DMatrix<f64>) -> Self {
        let raw = linalg::partial_correlations(omega);
        let p = raw.nrows();
        let psi = DMatrix::from_fn(p, p, |a, b| {
            let v = if a <= b { raw[(a, b)] } else { raw[(b, a)] };
            if a == b {
                1.0
            } else {
                v.clamp(-1.0, 1.0)
            }
        });
        Self { psi }
    }

    pub fn p(&self) -> usize {
        self.psi.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.psi
    }

    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.psi[(a, b)]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rule {
    And,
    Or,
}

impl std::str::FromStr for Rule {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "and" => Ok(Rule::And),
            "or" => Ok(Rule::Or),
            other => Err(Error::Config(format!("unknown rule {other:?} (expected and|or)"))),
        }
    }
}

impl std::fmt::Display for Rule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Rule::And => "and",
            Rule::Or => "or",
        })
    }
}

pub fn symmetrize(collection: &NeighborhoodCollection, rule: Rule) -> GraphEstimate {
    let g = &collection.gamma_all;
    let p = collection.p();
    let adjacency = DMatrix::from_fn(p, p, |a, b| {
        a != b
            && match rule {
                Rule::And => g[(a, b)] && g[(b, a)],
                Rule::Or => g[(a, b)] || g[(b, a)],
            }
    });
    GraphEstimate { adjacency }
}

fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Partial correlation from the two regression coefficients linking a pair:
/// `sign(b_ab) * min(sqrt(b_ab b_ba), 1)` when the signs agree and are
/// nonzero, zero otherwise.
pub fn pair_partial_correlation(b_ab: f64, b_ba: f64) -> f64 {
    let s = sign(b_ab);
    if s == 0.0 || s != sign(b_ba) {
        return 0.0;
    }
    let r = (b_ab * b_ba).sqrt();
    s * if r <= 1.0 { r } else { 1.0 }
}

pub fn assemble_psi(collection: &NeighborhoodCollection) -> PartialCorrEstimate {
    let b = &collection.beta_all;
    let p = collection.p();
    let psi = DMatrix::from_fn(p, p, |i, j| {
        if i == j {
            1.0
        } else {
            let (lo, hi) = (i.min(j), i.max(j));
            pair_partial_correlation(b[(lo, hi)], b[(hi, lo)])
        }
    });
    PartialCorrEstimate { psi }
}

/// Exact regression coefficients `beta_a^(b) = -w_ab / w_aa` from a precision matrix.
pub fn regression_coefficients(omega: &DMatrix<f64>) -> DMatrix<f64> {
    let p = omega.nrows();
    DMatrix::from_fn(p, p, |a, b| {
        if a == b {
            0.0
        } else {
            -omega[(a, b)] / omega[(a, a)]
        }
    })
}

/// Partial correlations obtained by going through the node-wise regression
/// coefficients implied by `omega`.
pub fn roundtrip_psi(omega: &DMatrix<f64>) -> Result<PartialCorrEstimate> {
    if !linalg::is_symmetric(omega) {
        return Err(Error::NotPositiveDefinite {
            context: "precision matrix is not symmetric".into(),
        });
    }
    linalg::cholesky(omega.clone(), "precision matrix")?;
    let p = omega.nrows();
    let collection = NeighborhoodCollection::new(
        regression_coefficients(omega),
        DMatrix::from_element(p, p, false),
    )?;
    Ok(assemble_psi(&collection))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConnectivityScores {
    /// Node degrees.
    pub degree: Vec<usize>,
    /// Row sums of `|psi|` off the diagonal.
    pub psi_sum: Vec<f64>,
}

pub fn connectivity_scores(
    graph: &GraphEstimate,
    psi: &PartialCorrEstimate,
) -> Result<ConnectivityScores> {
    if graph.p() != psi.p() {
        return Err(Error::Dimension(format!(
            "graph has {} nodes, partial correlations {}",
            graph.p(),
            psi.p()
        )));
    }
    let p = graph.p();
    Ok(ConnectivityScores {
        degree: (0..p).map(|a| graph.degree(a)).collect(),
        psi_sum: (0..p)
            .map(|a| (0..p).filter(|&b| b != a).map(|b| psi.get(a, b).abs()).sum())
            .collect(),
    })
}

/// The `k` most connected nodes: by degree, then `|psi|` sum, then index.
pub fn top_k(scores: &ConnectivityScores, k: usize) -> Vec<usize> {
    let mut nodes: Vec<usize> = (0..scores.degree.len()).collect();
    nodes.sort_by(|&a, &b| {
        scores.degree[b]
            .cmp(&scores.degree[a])
            .then(scores.psi_sum[b].total_cmp(&scores.psi_sum[a]))
            .then(a.cmp(&b))
    });
    nodes.truncate(k);
    nodes
}

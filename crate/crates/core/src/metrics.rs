//! Graph-recovery and partial-correlation accuracy metrics.

use crate::error::{Error, Result};
use crate::graph::{GraphEstimate, PartialCorrEstimate};
use crate::simgen::GroundTruth;

/// Edge decisions over the `p (p - 1) / 2` upper-triangle slots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ConfusionCounts {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    pub fn_: usize,
}

impl ConfusionCounts {
    pub fn total(&self) -> usize {
        self.tp + self.fp + self.tn + self.fn_
    }
}

pub fn confusion(estimate: &GraphEstimate, truth: &GraphEstimate) -> Result<ConfusionCounts> {
    if estimate.p() != truth.p() {
        return Err(Error::Dimension(format!(
            "estimate has {} nodes, truth {}",
            estimate.p(),
            truth.p()
        )));
    }
    let p = truth.p();
    let mut c = ConfusionCounts::default();
    for a in 0..p {
        for b in a + 1..p {
            match (estimate.has_edge(a, b), truth.has_edge(a, b)) {
                (true, true) => c.tp += 1,
                (true, false) => c.fp += 1,
                (false, true) => c.fn_ += 1,
                (false, false) => c.tn += 1,
            }
        }
    }
    Ok(c)
}

/// `fp / (fp + tp)`, or 0 with no discoveries.
pub fn fdr(c: &ConfusionCounts) -> f64 {
    let d = c.fp + c.tp;
    if d == 0 {
        0.0
    } else {
        c.fp as f64 / d as f64
    }
}

/// `tp / (tp + fn)`, or 0 when there are no true edges.
pub fn tpr(c: &ConfusionCounts) -> f64 {
    let t = c.tp + c.fn_;
    if t == 0 {
        0.0
    } else {
        c.tp as f64 / t as f64
    }
}

/// Squared partial-correlation errors summed over `a < b`, split by whether
/// the true value is zero. These are sums, not averages.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MseSplit {
    pub zero: f64,
    pub nonzero: f64,
    pub total: f64,
}

pub fn mse_split_psi(psi_hat: &PartialCorrEstimate, psi_true: &PartialCorrEstimate) -> Result<MseSplit> {
    if psi_hat.p() != psi_true.p() {
        return Err(Error::Dimension(format!(
            "estimate has {} nodes, truth {}",
            psi_hat.p(),
            psi_true.p()
        )));
    }
    let p = psi_true.p();
    let (mut zero, mut nonzero) = (0.0, 0.0);
    for a in 0..p {
        for b in a + 1..p {
            let t = psi_true.get(a, b);
            let e = (psi_hat.get(a, b) - t).powi(2);
            if t == 0.0 {
                zero += e;
            } else {
                nonzero += e;
            }
        }
    }
    Ok(MseSplit {
        zero,
        nonzero,
        total: zero + nonzero,
    })
}

pub fn mse_split(psi_hat: &PartialCorrEstimate, truth: &GroundTruth) -> Result<MseSplit> {
    mse_split_psi(psi_hat, &truth.psi)
}

/// Per-replicate summary used for reporting and averaging.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ReplicateMetrics {
    pub counts: ConfusionCounts,
    pub fdr: f64,
    pub tpr: f64,
    pub mse: MseSplit,
}

impl ReplicateMetrics {
    pub fn evaluate(
        graph: &GraphEstimate,
        psi: &PartialCorrEstimate,
        truth_graph: &GraphEstimate,
        truth_psi: &PartialCorrEstimate,
    ) -> Result<Self> {
        let counts = confusion(graph, truth_graph)?;
        Ok(Self {
            counts,
            fdr: fdr(&counts),
            tpr: tpr(&counts),
            mse: mse_split_psi(psi, truth_psi)?,
        })
    }
}

/// Replicate-averaged metrics (`fdr`, `tpr`, the three MSE sums) and mean edge count.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AggregateMetrics {
    pub replicates: usize,
    pub fdr: f64,
    pub tpr: f64,
    pub mse_zero: f64,
    pub mse_nonzero: f64,
    pub mse_total: f64,
    pub discoveries: f64,
}

pub fn aggregate(reps: &[ReplicateMetrics]) -> AggregateMetrics {
    let k = reps.len() as f64;
    let mean = |f: &dyn Fn(&ReplicateMetrics) -> f64| reps.iter().map(f).sum::<f64>() / k;
    AggregateMetrics {
        replicates: reps.len(),
        fdr: mean(&|r| r.fdr),
        tpr: mean(&|r| r.tpr),
        mse_zero: mean(&|r| r.mse.zero),
        mse_nonzero: mean(&|r| r.mse.nonzero),
        mse_total: mean(&|r| r.mse.total),
        discoveries: mean(&|r| (r.counts.tp + r.counts.fp) as f64),
    }
}

//! Reference estimators: spike-and-slab node-wise regression and the
//! conjugate inverse-Wishart joint estimator.

pub mod basad;
pub mod iw;

pub use basad::{basad_chain, basad_select, basad_solve_qn, binomial_upper_tail, BasadConfig, BasadPosterior};
pub use iw::{iw_graph, iw_point_estimate, iw_posterior_precision, iw_precision_estimate, iw_psi_draws, IwConfig};

use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed CSV {path}: {message}")]
    Csv { path: PathBuf, message: String },
    #[error("ragged row {row}: expected {expected} fields, found {found}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("non-numeric value {value:?} at row {row}, column {column} ({name})")]
    NonNumeric {
        row: usize,
        column: usize,
        name: String,
        value: String,
    },
    #[error("duplicate column name {name:?} at columns {first} and {second}")]
    DuplicateColumn {
        name: String,
        first: usize,
        second: usize,
    },
    #[error("column {name:?} is constant and cannot be standardized")]
    ConstantColumn { name: String },
    #[error("dataset too small: need at least {min} {what}, found {found}")]
    TooSmall {
        what: &'static str,
        min: usize,
        found: usize,
    },
    #[error("index {index} out of range for {len} {what}")]
    OutOfRange {
        what: &'static str,
        index: usize,
        len: usize,
    },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("matrix is not positive definite ({context})")]
    NotPositiveDefinite { context: String },
    #[error("numerical failure at iteration {iteration}: {message}")]
    Numerical { iteration: usize, message: String },
    #[error("non-finite log marginal likelihood for model of size {size}")]
    NonFiniteScore { size: usize },
    #[error("no inclusion probability satisfies the tail constraint: cap {cap} with {trials} candidate predictors")]
    NoRoot { cap: usize, trials: usize },
    #[error("G-Wishart completion did not converge after {sweeps} sweeps (last change {change:e})")]
    NoConvergence { sweeps: usize, change: f64 },
    #[error("node {node} failed: {source}")]
    Node {
        node: usize,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

//! Error type shared by the whole crate.

use thiserror::Error;

/// Errors produced by construction, assembly, and search routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("invalid angular grid: {0}")]
    InvalidGrid(String),

    #[error("invalid waveform: {0}")]
    InvalidWaveform(String),

    #[error("invalid scene: {0}")]
    InvalidScene(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// An exhaustive subset scan would evaluate more candidate subsets than
    /// the configured budget allows. Signals that the instance is too large
    /// for exact computation, not a numerical failure.
    #[error("subset budget exceeded: scan requires {required} subset evaluations, budget is {budget}")]
    BudgetExceeded { required: u64, budget: u64 },

    #[error("no support of size <= {k_max} fits the measurement within relative residual {tol:e}")]
    NoFeasibleSupport { k_max: usize, tol: f64 },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

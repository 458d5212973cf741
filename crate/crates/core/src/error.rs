use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("graphs are incompatible: (n={}, directed={}) vs (n={}, directed={})", left.0, left.1, right.0, right.1)]
    Incompatible {
        left: (usize, bool),
        right: (usize, bool),
    },

    #[error("vertex {vertex} out of range for graph with {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("self-loop at vertex {0} is not allowed")]
    SelfLoop(usize),

    #[error("no advancing move exists (current graph equals the target)")]
    NoAdvancingMove,

    #[error("no legal regressing move exists")]
    RegressingExhausted,

    #[error("illegal move on edge ({}, {}): {reason}", edge.0, edge.1)]
    IllegalMove {
        edge: (usize, usize),
        reason: &'static str,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("step limit of {0} reached before the stopping condition")]
    StepLimit(u64),

    #[error("hitting time requested for d_o = {d_o} below d_t = {d_t}; only d_o >= d_t is supported")]
    UnsupportedRegime { d_o: u64, d_t: u64 },

    #[error("graph too large for exhaustive enumeration: n = {0} (max 4)")]
    TooLarge(usize),

    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("basis is not orthonormal (deviation {0:e})")]
    NotOrthonormal(f64),

    #[error("trace replay mismatch at step {step}: {reason}")]
    ReplayMismatch { step: usize, reason: String },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("unsupported trace format version {0:?}")]
    Version(String),

    #[error("truncated input: {0}")]
    Truncated(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

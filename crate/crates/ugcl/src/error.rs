//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum UgclError {
    #[error("empty graph")]
    EmptyGraph,

    #[error("invalid sample size: requested {requested} from {available} nodes")]
    InvalidSampleSize { requested: usize, available: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("divergent gradient: non-finite entry in {0}")]
    DivergentGradient(String),

    #[error("divergent loss at epoch {epoch}: {value}")]
    DivergentLoss { epoch: usize, value: f64 },

    #[error("no negatives: contrastive loss needs at least 2 rows, got {0}")]
    NoNegatives(usize),

    #[error("degenerate embedding: row {row} has norm {norm:e}")]
    DegenerateEmbedding { row: usize, norm: f64 },

    #[error("no labeled nodes")]
    NoLabeledNodes,

    #[error("graph too large for dense eigendecomposition: {nodes} nodes exceeds budget {budget}; analyze an induced subsample instead")]
    EigenBudgetExceeded { nodes: usize, budget: usize },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error("config drift: params were trained under a different configuration (stored hash {stored}, current {current})")]
    ConfigDrift { stored: String, current: String },

    #[error("unknown config key `{0}`")]
    UnknownKey(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, UgclError>;

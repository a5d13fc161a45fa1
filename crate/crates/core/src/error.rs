use thiserror::Error;

/// Errors raised while validating inputs or running the clustering pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum PlscanError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("non-finite coordinate at point {point}, dimension {dim}")]
    NonFinite { point: usize, dim: usize },

    #[error("k = {k} is out of bounds: need 1 <= k <= n - 1 with n = {n}")]
    NeighbourCount { k: usize, n: usize },

    #[error("minimum cluster size {min_size} must exceed the largest sample weight {max_weight}")]
    MinClusterSize { min_size: f64, max_weight: f64 },

    #[error("sample weight at point {point} is {weight}; weights must be finite and > 0")]
    SampleWeight { point: usize, weight: f64 },

    #[error("edge ({u}, {v}) closes a cycle in the spanning forest")]
    Cycle { u: usize, v: usize },

    #[error("duplicate edge ({u}, {v}) in the spanning forest")]
    DuplicateEdge { u: usize, v: usize },

    #[error("metric {metric} is not supported by the {tree} tree")]
    UnsupportedTree { metric: &'static str, tree: &'static str },

    #[error("ultrametric inequality violated for elements ({0}, {1}, {2})")]
    NotUltrametric(usize, usize, usize),

    #[error("{context}: {message}")]
    Parse { context: String, message: String },

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for PlscanError {
    fn from(err: std::io::Error) -> Self {
        PlscanError::Io(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, PlscanError>;

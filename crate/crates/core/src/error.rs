use thiserror::Error;

/// Errors raised by graph construction, analysis and I/O.
#[derive(Debug, Error)]
pub enum Error {
    #[error("nonpositive weight {weight} at vertex {vertex}")]
    NonpositiveWeight { vertex: usize, weight: f64 },

    #[error("non-finite value at vertex {vertex}")]
    NonFinite { vertex: usize },

    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),

    #[error("vertex id {id} out of range for {n} vertices")]
    InvalidVertex { id: usize, n: usize },

    #[error("graph is disconnected ({components} components)")]
    Disconnected { components: usize },

    #[error("graph has no vertices")]
    EmptyGraph,

    #[error("dimension mismatch: expected {expected} values, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid exponent {0}: must be >= 1 or infinity")]
    InvalidExponent(f64),

    #[error("empty vertex subset")]
    EmptySubset,

    #[error("invalid tree: {0}")]
    InvalidTree(String),

    #[error("tree edge {0}-{1} is not an edge of the graph")]
    TreeEdgeNotInGraph(usize, usize),

    #[error("input does not sum to zero: weighted sum {sum:e} exceeds tolerance {tolerance:e}")]
    NotZeroMean { sum: f64, tolerance: f64 },

    #[error("function is identically zero")]
    ZeroFunction,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("exhaustive search needs {needed:.3e} tree/root evaluations, cap is {cap}")]
    SearchCapExceeded { needed: f64, cap: u64 },

    #[error("parse error at {context}: {message}")]
    Parse { context: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

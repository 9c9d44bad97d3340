use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("unlucky prime {prime}: {detail}")]
    UnluckyPrime { prime: u64, detail: String },

    /// A computed dimension disagrees with its closed-form oracle.
    #[error("oracle mismatch for {what}: computed {computed}, oracle {oracle}")]
    OracleMismatch {
        what: String,
        computed: usize,
        oracle: usize,
    },

    #[error("subspace containment violated: basis vector {index} of the smaller space is not in the larger")]
    NotContained { index: usize, vector: Vec<String> },

    #[error("no solution: {0}")]
    NoSolution(String),

    #[error("hypothesis not satisfied: {0}")]
    Hypothesis(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("internal inconsistency: {0}")]
    Inconsistent(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("cache error: {0}")]
    Cache(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

use thiserror::Error;

/// Errors raised while building, compiling, synthesizing or verifying.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{what} index {index} out of range (limit {limit})")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        limit: usize,
    },

    #[error("non-Hermitian Pauli string (phase {0}) where a Hermitian one is required")]
    NonHermitian(String),

    #[error("operator is not Hermitian (deviation {0:e})")]
    NotHermitianMatrix(f64),

    #[error("instance needs {qubits} qubits, dense oracle limit is {limit}")]
    OracleLimit { qubits: usize, limit: usize },

    #[error("model configuration: {0}")]
    Config(String),

    #[error("circuit text line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("{0}")]
    Unsupported(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

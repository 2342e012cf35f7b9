use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("qubit index {index} out of range for a {n_qubits}-qubit state")]
    QubitOutOfRange { index: usize, n_qubits: usize },

    #[error("{n_qubits} qubits exceeds the dense engine cap of {cap} (set NONLOCAL_MAX_QUBITS to raise it)")]
    TooManyQubits { n_qubits: usize, cap: usize },

    #[error("conditioned CHSH is not monotone in p on the check grid: {0:?}")]
    NonMonotone(Vec<(f64, f64)>),

    #[error("deterministic strategy space of 2^{bits} exceeds the 2^24 guard")]
    SearchSpaceTooLarge { bits: usize },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}

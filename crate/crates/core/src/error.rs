use thiserror::Error;

/// Errors raised by the analysis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("SVD failed to converge")]
    SvdNoConvergence,

    #[error("invalid mode {0}: expected 1, 2 or 3")]
    InvalidMode(usize),

    #[error("invalid cut: {0}")]
    InvalidCut(String),

    #[error("unknown gate: {0}")]
    UnknownGate(String),

    #[error("unknown claim: {0}")]
    UnknownClaim(String),

    #[error("non-finite entry in {0}")]
    NonFinite(&'static str),

    #[error("matrix is not unitary (max deviation {0:.3e})")]
    NotUnitary(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("line {line}: {kind}")]
    Parse { line: usize, kind: ParseErrorKind },
}

/// What went wrong while reading a circuit file.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseErrorKind {
    #[error("unknown gate name `{0}`")]
    UnknownGate(String),
    #[error("index out of range: qubit {index} in a {n_qubits}-qubit register")]
    IndexOutOfRange { index: usize, n_qubits: usize },
    #[error("duplicate index {0}")]
    DuplicateIndex(usize),
    #[error("arity mismatch: `{gate}` takes {expected} qubit(s), got {found}")]
    ArityMismatch {
        gate: String,
        expected: usize,
        found: usize,
    },
    #[error("invalid qubit index `{0}`")]
    BadIndex(String),
    #[error("invalid header: {0}")]
    BadHeader(String),
}

pub type Result<T> = std::result::Result<T, Error>;

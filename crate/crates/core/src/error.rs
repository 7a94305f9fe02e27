use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: expected {expected}, got {actual}")]
    Shape { expected: String, actual: String },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: String, right: String },

    #[error("matrix is not Hermitian (defect {defect:.3e})")]
    NotHermitian { defect: f64 },

    #[error("matrix is not unitary (defect {defect:.3e})")]
    NotUnitary { defect: f64 },

    #[error("operator is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPositiveSemidefinite { min_eigenvalue: f64 },

    #[error("operator is not a projector (defect {defect:.3e})")]
    NotProjector { defect: f64 },

    #[error("{side} tuple is not mutually orthogonal: members {first} and {second} overlap ({overlap:.3e})")]
    NonOrthogonalTuple {
        side: &'static str,
        first: usize,
        second: usize,
        overlap: f64,
    },

    #[error("state is not trace-normalized (trace {trace})")]
    NotNormalized { trace: f64 },

    #[error("zero vector")]
    ZeroVector,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("construction inapplicable: {0}")]
    Inapplicable(String),

    #[error("group is not closed under multiplication")]
    GroupNotClosed,

    #[error("invariance precondition failed: {0}")]
    InvarianceFailed(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(err: serde_json::Error) -> Self {
        Error::Parse(err.to_string())
    }
}

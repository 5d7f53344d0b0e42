use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("point is not interior: coordinate {coord} has modulus {modulus} >= 1")]
    BoundaryPoint { coord: usize, modulus: f64 },

    #[error("truncation mismatch: {0}")]
    TruncationMismatch(String),

    #[error("invalid truncation: {0}")]
    InvalidTruncation(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("restriction point is not unimodular")]
    NotUnimodular,

    #[error("coordinate {k} out of range for dimension {n}")]
    BadCoordinate { k: usize, n: usize },

    #[error("invalid radial profile: {0}")]
    InvalidRadial(String),

    #[error("matrix has non-finite entries")]
    NonFinite,

    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("symbol is not radial: {0}")]
    NotRadial(String),

    #[error("symbol is not a polynomial in z and conj(z)")]
    NotPolynomial,

    #[error("factor {0} is not a pure tensor product")]
    NotTensor(usize),

    /// A hypothesis of the criterion being applied does not hold.
    #[error("refused: {0}")]
    Refusal(String),

    #[error("claim failed: {0}")]
    ClaimFailed(String),

    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;

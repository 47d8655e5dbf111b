use thiserror::Error;

use crate::spectral::CertifiedValue;

/// Errors raised anywhere in the library.
///
/// Matrix indices reported in messages are 1-based.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix has no rows")]
    Empty,
    #[error("matrix is not square: row {row} has {len} entries, expected {expected}")]
    NonSquare { row: usize, len: usize, expected: usize },
    #[error("negative entry {value} at ({row}, {col})")]
    NegativeEntry { row: usize, col: usize, value: f64 },
    #[error("non-finite entry at ({row}, {col})")]
    NonFiniteEntry { row: usize, col: usize },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("empty list of matrices")]
    EmptyList,
    #[error("negative exponent {0}")]
    NegativeExponent(f64),
    #[error("matrix power must be at least 1")]
    ZeroPower,
    #[error("result overflows the finite range of f64")]
    Overflow,
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("invalid weights: {0}")]
    InvalidWeights(String),
    #[error("weights must sum to 1, got {0}")]
    WeightsNotConvex(f64),
    #[error("weights must sum to at least 1, got {0}")]
    WeightsTooSmall(f64),
    #[error("exponents ({alpha}, {beta}) are outside the symmetrization domain")]
    ExponentDomain { alpha: f64, beta: f64 },
    #[error("depth {0} is too large")]
    DepthOverflow(usize),
    #[error("functional {0} is not supported here")]
    UnsupportedFunctional(String),
    #[error("list of {0} matrices must have even length")]
    OddM(usize),
    #[error("pair family of kind Q needs a second permutation")]
    MissingPermutation,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("spectral radius did not converge: bracket [{}, {}]", best.lo, best.hi)]
    NotConverged { best: CertifiedValue },
    #[error("unknown law {0}")]
    UnknownLaw(String),
    #[error("input does not match law {law}: {reason}")]
    InputShapeMismatch { law: String, reason: String },
    #[error("could not generate an input satisfying law {0}")]
    Unsatisfiable(String),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("i/o error: {0}")]
    Io(String),
    #[error("json error: {0}")]
    Json(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}

use thiserror::Error;

use crate::kron::Code;

/// Errors raised by the codec, the series model and the multiplication kernels.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// The product of the range widths (plus the offset headroom) does not fit
    /// the code integer, so this variable/range configuration cannot be mapped
    /// onto univariate codes.
    #[error("codec capacity overflow: {0}")]
    CapacityOverflow(String),

    #[error("multiindex {index:?} lies outside the codec box [{min:?}, {max:?}]")]
    OutOfRange {
        index: Vec<i64>,
        min: Vec<i64>,
        max: Vec<i64>,
    },

    #[error("code {code} outside [0, {capacity})")]
    CodeOutOfRange { code: Code, capacity: Code },

    #[error("expected {expected} variables, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid range: lower bound {min} exceeds upper bound {max} for variable {var}")]
    InvalidRange { var: usize, min: i64, max: i64 },

    /// A Poisson product needs an exact division by two that the coefficient
    /// ring cannot perform (odd integer).
    #[error("coefficient {0} cannot be halved exactly in this ring")]
    HalvingUnsupported(String),

    #[error("factors were encoded with different codecs")]
    CodecMismatch,

    #[error("series terms are not sorted by strictly ascending code")]
    NotSorted,

    #[error("concurrent writes overlap in schedule column {column}")]
    DisjointnessViolation { column: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;

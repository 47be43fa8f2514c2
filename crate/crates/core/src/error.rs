use thiserror::Error;

use crate::exact::Rational;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid interval: lower endpoint {lo} is not below upper endpoint {hi}")]
    InvalidInterval { lo: String, hi: String },

    #[error("affine scale must be nonzero")]
    ZeroScale,

    #[error("malformed rational literal `{0}`")]
    BadRational(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    /// A sequence or set lacks a capability the operation needs.
    #[error("missing capability `{capability}`: {detail}")]
    Capability { capability: &'static str, detail: String },

    #[error("sequence is not strictly increasing at index {index}")]
    NotIncreasing { index: u64 },

    #[error("function is not non-decreasing: value drops at index {index}")]
    NotNonDecreasing { index: u64 },

    #[error("base point {term} (index {n}) coincides with a term of member {member}")]
    Collision { member: usize, n: u64, term: Rational },

    #[error("oracle contract breach at stage {stage}: {detail}")]
    OracleBreach { stage: usize, detail: String },

    #[error("index overflow: {0}")]
    Overflow(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn capability(capability: &'static str, detail: impl Into<String>) -> Self {
        Error::Capability {
            capability,
            detail: detail.into(),
        }
    }

    pub(crate) fn invalid(detail: impl Into<String>) -> Self {
        Error::Invalid(detail.into())
    }
}

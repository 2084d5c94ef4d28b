use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("empty box: lower corner {lower:?} exceeds upper corner {upper:?}")]
    EmptyBox { lower: Vec<i32>, upper: Vec<i32> },

    #[error("dimension {0} is not supported (expected 1..=4)")]
    UnsupportedDimension(usize),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("region is not {scale}-admissible: {reason}")]
    NotAdmissible { scale: i32, reason: String },

    #[error("invalid covering parameters: {0}")]
    Covering(String),

    #[error("instance too large: {what} is {size}, limit is {limit}")]
    TooLarge {
        what: &'static str,
        size: u64,
        limit: u64,
    },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("p(J) = 1 on edge {0}; the adapted partition function is undefined")]
    SaturatedEdge(usize),

    #[error("r(K, p) requires p >= {threshold} for K = {k}, got p = {p}")]
    LssDomain { k: u32, p: f64, threshold: f64 },

    #[error("argument {x} outside the open interval (-1, 1)")]
    LegendreDomain { x: f64 },

    #[error("event `{0}` is not marked increasing")]
    NotIncreasing(String),

    #[error("invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}

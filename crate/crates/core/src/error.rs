use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("not a perfect square: {0}")]
    NotAPerfectSquare(String),

    #[error("subspace is not isotropic: {0}")]
    NotIsotropic(String),

    #[error("ambiguous numeric rank: singular value {value:e} lies within the margin around threshold {threshold:e}")]
    AmbiguousRank { value: f64, threshold: f64 },

    #[error("non-finite value produced by {0}")]
    NonFinite(&'static str),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("invalid subspace: {0}")]
    InvalidSubspace(String),

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("system is not square: {0}")]
    NonSquareSystem(String),

    #[error("unsupported target: {0}")]
    UnsupportedTarget(String),

    #[error("too many paths: total degree {paths} exceeds the limit {limit}")]
    TooManyPaths { paths: u128, limit: u128 },

    #[error("tableau count disagreement for {shape}: formula {formula}, enumeration {enumeration}")]
    CountDisagreement {
        shape: String,
        formula: u128,
        enumeration: u128,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("internal consistency failure: {0}")]
    Consistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;

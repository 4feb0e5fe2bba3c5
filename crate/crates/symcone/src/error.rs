//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("dimension mismatch: {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix entry is not finite")]
    NonFiniteEntry,

    #[error("matrix is not positive definite ({0})")]
    NotPositiveDefinite(String),

    #[error("element is not idempotent (|c\u{b2} - c| = {deviation:.3e})")]
    NotIdempotent { deviation: f64 },

    #[error("element is not in the half eigenspace of the idempotent (leakage {0:.3e})")]
    NotInHalfSpace(f64),

    #[error("block index k = {k} out of range 1..={r}")]
    BlockIndexOutOfRange { k: usize, r: usize },

    #[error("{0}")]
    InvalidParameter(String),

    #[error("point outside the support of the distribution")]
    OutOfSupport,
}

pub type Result<T> = std::result::Result<T, Error>;

//! Error type shared by every module in the crate.

use thiserror::Error;

/// Failures surfaced by the library.
///
/// `InvalidParameter` and `DimensionMismatch` indicate caller mistakes and are
/// always detected before any work starts; `Numerical` means an iterative
/// kernel diverged, hit its iteration cap, or produced non-finite values.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;

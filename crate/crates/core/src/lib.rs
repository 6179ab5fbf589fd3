//! Exact set arithmetic in `Z/pZ` and `Z` for small-doubling experiments:
//! sumsets, minimal arithmetic-progression covers, isoperimetric numbers and
//! atoms, checkers for the classical sumset theorems, exhaustive small-prime
//! surveys, and a numeric-inequality audit.

pub mod ap;
pub mod atoms;
pub mod audit;
pub mod oracle;
pub mod survey;
pub mod theorems;
pub mod verdict;
pub mod zint;
pub mod zp;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Bad arguments or precondition violations (exit code 4).
    #[error("usage: {0}")]
    Usage(String),
    /// A search budget or cap was exceeded (exit code 5).
    #[error("resource: {0}")]
    Resource(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Largest prime for which exhaustive subset enumeration is allowed.
/// Overridable through `DOUBLING_EXHAUSTIVE_CAP`.
pub fn exhaustive_cap() -> u64 {
    std::env::var("DOUBLING_EXHAUSTIVE_CAP")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(23)
}

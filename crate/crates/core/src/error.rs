use thiserror::Error;

use crate::matrix::MatrixError;
use crate::ring::RingError;
use crate::series::SeriesError;

/// Errors raised by the cokernel, decomposition and Witt-group layers.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error("precision error: {0}")]
    Precision(String),
    #[error("capability error: {0}")]
    Capability(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("stale pair: {0}")]
    Stale(String),
    #[error("no witness: {0}")]
    NoWitness(String),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
    #[error("cancelled by caller")]
    Cancelled,
}

impl Error {
    /// `true` for errors caused by an unsupported ring or flavor rather than
    /// bad data.
    pub fn is_capability(&self) -> bool {
        matches!(
            self,
            Error::Capability(_)
                | Error::Ring(RingError::Capability(_))
                | Error::Matrix(MatrixError::Ring(RingError::Capability(_)))
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

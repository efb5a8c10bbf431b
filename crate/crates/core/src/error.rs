//! Error classification shared by every module.
//!
//! Three classes cover everything the library can reject: bad configuration
//! (invalid model or experiment parameters), bad data (shape mismatches,
//! non-finite values, empty inputs) and numerical failure (rank deficiency,
//! division by a vanishing norm). The CLI maps the classes onto distinct
//! exit codes, so the split is part of the public contract.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Invalid parameters: wrong model kind, nonpositive variance, bad dims.
    #[error("configuration error: {0}")]
    Config(String),

    /// Invalid data fed to an operation: shape mismatch, empty sample,
    /// non-finite value.
    #[error("data error: {0}")]
    Data(String),

    /// Numerical failure inside an otherwise valid computation.
    #[error("numerical error: {0}")]
    Numerical(String),
}

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub fn data(msg: impl Into<String>) -> Self {
        Error::Data(msg.into())
    }

    pub fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

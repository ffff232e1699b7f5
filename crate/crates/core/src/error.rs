//! Crate-wide error type.

use std::fmt;

/// Errors produced by tensor ops, neuron dynamics, training, and I/O.
#[derive(Debug)]
pub enum Error {
    /// Incompatible tensor shapes; carries a description of the mismatch.
    Shape(String),
    /// Invalid configuration (bad constants, missing TE, T mismatch, bad keys).
    Config(String),
    /// Non-finite values entered the forward dynamics.
    Dynamics(String),
    /// Non-finite or inconsistent values in a backward pass.
    Gradient(String),
    /// Training-time failure (non-finite gradient/loss), names the culprit.
    Training(String),
    /// File parse failure (IDX, checkpoint, config); includes offsets where known.
    Parse(String),
    /// Underlying I/O failure.
    Io(std::io::Error),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Shape(m) => write!(f, "shape error: {m}"),
            Error::Config(m) => write!(f, "config error: {m}"),
            Error::Dynamics(m) => write!(f, "dynamics error: {m}"),
            Error::Gradient(m) => write!(f, "gradient error: {m}"),
            Error::Training(m) => write!(f, "training error: {m}"),
            Error::Parse(m) => write!(f, "parse error: {m}"),
            Error::Io(e) => write!(f, "io error: {e}"),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::Io(e) => Some(e),
            _ => None,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e)
    }
}

pub type Result<T> = std::result::Result<T, Error>;

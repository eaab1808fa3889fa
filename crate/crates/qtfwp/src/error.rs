use thiserror::Error;

/// Errors produced by the qtfwp library.
#[derive(Debug, Error)]
pub enum Error {
    /// A builder or generator was handed parameters outside its supported range.
    #[error("configuration error: {0}")]
    Config(String),

    /// A gate referenced a qubit the register does not have.
    #[error("circuit error: {0}")]
    Circuit(String),

    /// Vector or matrix lengths do not line up.
    #[error("shape error: {0}")]
    Shape(String),

    /// Scalar inputs were non-finite or otherwise unusable.
    #[error("input error: {0}")]
    Input(String),

    /// A data file could not be parsed. Row numbers are 1-based and include the header.
    #[error("parse error at row {row}: {message}")]
    Parse { row: usize, message: String },

    /// Min-max normalization is undefined for the given segment.
    #[error("normalization error: {0}")]
    Normalization(String),

    /// Training produced a non-finite loss or gradient.
    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

//! Crate-wide error type for analysis and I/O operations.
//!
//! Aspect advice failures use [`crate::aspect::AspectError`] instead; this
//! type covers model analysis, configuration, and filesystem work.

use crate::goal_model::ParseError;

#[derive(Debug, thiserror::Error)]
pub enum WorkbenchError {
    #[error("unknown element: {0}")]
    UnknownElement(String),

    #[error("{id} is a {actual}, expected a {expected}")]
    WrongElementKind {
        id: String,
        expected: &'static str,
        actual: &'static str,
    },

    #[error("parse error at {0}")]
    Parse(#[from] ParseError),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("precision rate {0} is outside [0, 1]")]
    InvalidPrecisionRate(f64),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

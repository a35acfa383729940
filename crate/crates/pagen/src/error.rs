use std::io;

use thiserror::Error;

/// Errors produced anywhere in the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    /// A run configuration (seed spec, generation size, sweep grid, ...) is unusable.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// A model definition (weight table, three-parameter spec) violates its invariants.
    #[error("validation failed: {0}")]
    Validation(String),

    /// A text input (edge list, weight-table CSV) could not be parsed.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// An operation was called with arguments outside its contract.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A formula was evaluated outside its mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// The operation refuses to run (too little data, instance too large).
    #[error("refused: {0}")]
    Refusal(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

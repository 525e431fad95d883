//! Error types shared across the crate.

use std::path::PathBuf;

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Input bytes were not valid UTF-8.
    #[error("invalid utf-8 input{}", context_suffix(.context))]
    InvalidEncoding { context: Option<String> },

    /// A score has no defined value (e.g. empty ground truth).
    #[error("undefined score: {0}")]
    UndefinedScore(String),

    /// A structured input file failed to parse.
    #[error("parse error{}: {message}", location_suffix(.line))]
    Parse { message: String, line: Option<usize> },

    /// Parsed data violated a model or manifest constraint.
    #[error("validation error: {0}")]
    Validation(String),

    /// A precondition of an operation did not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub fn parse_at(line: usize, message: impl Into<String>) -> Self {
        Error::Parse { message: message.into(), line: Some(line) }
    }

    pub fn parse(message: impl Into<String>) -> Self {
        Error::Parse { message: message.into(), line: None }
    }
}

fn context_suffix(context: &Option<String>) -> String {
    match context {
        Some(c) => format!(" in {c}"),
        None => String::new(),
    }
}

fn location_suffix(line: &Option<usize>) -> String {
    match line {
        Some(l) => format!(" at line {l}"),
        None => String::new(),
    }
}

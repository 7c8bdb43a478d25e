//! Error and result types shared across the crate.

use std::path::PathBuf;
use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// All failure modes surfaced by this crate.
///
/// Variants are grouped so callers can distinguish I/O faults (`Io`,
/// `Utf8`, `SizeMismatch`) from validation faults (everything else);
/// the command-line layer maps the former to exit code 2 and the
/// latter to exit code 1.
#[derive(Debug, Error)]
pub enum Error {
    /// Underlying filesystem failure.
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// A data file could not be parsed; `line` is 1-based.
    #[error("parse error at {path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    /// A lexicon listed the same match-phrase twice.
    #[error("duplicate lexicon entry for phrase {phrase:?} in {lexicon}")]
    DuplicateEntry { lexicon: String, phrase: String },

    /// A text file was not valid UTF-8.
    #[error("invalid utf-8 in {path} at byte offset {offset}")]
    Utf8 { path: PathBuf, offset: usize },

    /// Operands have incompatible dimensions.
    #[error("shape mismatch: {message}")]
    ShapeMismatch { message: String },

    /// Input is structurally valid but mathematically unusable
    /// (zero-norm vector, constant sample, rank-0 matrix, ...).
    #[error("degenerate input: {message}")]
    DegenerateInput { message: String },

    /// Configuration value outside its documented domain.
    #[error("invalid configuration: {message}")]
    InvalidConfig { message: String },

    /// A matrix or model entry was NaN or infinite.
    #[error("non-finite value at row {row}")]
    NonFinite { row: usize },

    /// An embedding payload does not match its sidecar dimensions.
    #[error("size mismatch for {path}: expected {expected} bytes, found {actual}")]
    SizeMismatch {
        path: PathBuf,
        expected: u64,
        actual: u64,
    },

    /// An operation that needs at least one element received none.
    #[error("empty input: {message}")]
    EmptyInput { message: String },

    /// Training produced a NaN or infinite loss and was aborted.
    #[error("non-finite training loss at step {step}: {message}")]
    NonFiniteLoss { step: usize, message: String },
}

impl Error {
    /// Wraps an `std::io::Error` with the path it occurred on.
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Shorthand for [`Error::InvalidConfig`].
    pub fn config(message: impl Into<String>) -> Self {
        Error::InvalidConfig {
            message: message.into(),
        }
    }

    /// Shorthand for [`Error::DegenerateInput`].
    pub fn degenerate(message: impl Into<String>) -> Self {
        Error::DegenerateInput {
            message: message.into(),
        }
    }

    /// Shorthand for [`Error::ShapeMismatch`].
    pub fn shape(message: impl Into<String>) -> Self {
        Error::ShapeMismatch {
            message: message.into(),
        }
    }

    /// Shorthand for [`Error::EmptyInput`].
    pub fn empty(message: impl Into<String>) -> Self {
        Error::EmptyInput {
            message: message.into(),
        }
    }

    /// True for faults the command-line layer reports as I/O (exit code 2).
    pub fn is_io(&self) -> bool {
        matches!(
            self,
            Error::Io { .. } | Error::Utf8 { .. } | Error::SizeMismatch { .. }
        )
    }
}

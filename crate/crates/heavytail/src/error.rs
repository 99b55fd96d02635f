//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by trace ingestion, analysis, fitting, and generation.
#[derive(Debug, Error)]
pub enum Error {
    /// A trace line could not be parsed. Lines are counted from 1,
    /// including the header.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// The trace contained a header but no events.
    #[error("empty log: no events after header")]
    EmptyLog,

    /// Not enough data to carry out an analysis (too few events,
    /// intervals, samples, or in-range points).
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// A parameter or parameter combination was outside its valid range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A fit was requested on data that cannot constrain the model
    /// (zero variance, degenerate support).
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    /// A nonlinear fit did not converge within its iteration cap.
    #[error("fit failure: {0}")]
    FitFailure(String),

    /// A requested user does not appear in the trace.
    #[error("unknown user: {0}")]
    UnknownUser(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code for the command-line front end: 1 for malformed
    /// input, 2 for statistical insufficiency or invalid parameters.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. } | Error::EmptyLog | Error::Io(_) | Error::Json(_) => 1,
            Error::InsufficientData(_)
            | Error::InvalidParameter(_)
            | Error::DegenerateFit(_)
            | Error::FitFailure(_)
            | Error::UnknownUser(_) => 2,
        }
    }
}

use thiserror::Error;

/// Errors produced by the embedding, extraction and I/O pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("format error at byte {offset}: {reason}")]
    Format { offset: usize, reason: String },

    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("parameter error: {0}")]
    Parameter(String),

    #[error("numeric input error: {0}")]
    NumericInput(String),

    /// `line` is 1-based and present when the key was parsed from text.
    #[error("corrupt key{}: {reason}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    CorruptKey { line: Option<usize>, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;

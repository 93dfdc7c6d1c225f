use thiserror::Error;

/// Failure classes shared by every operation in the crate.
///
/// The CLI maps these onto exit codes, so the split between them matters:
/// `Format`/`Invalid` are the caller's fault, `Resource` is a size guard and
/// `Invariant` is always a bug in this crate.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Format { line: usize, msg: String },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("resource guard: {0}")]
    Resource(String),
    #[error("invariant breach: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Invalid(msg.into()))
}

pub(crate) fn breach<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Invariant(msg.into()))
}

pub(crate) fn format_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Format {
        line,
        msg: msg.into(),
    }
}

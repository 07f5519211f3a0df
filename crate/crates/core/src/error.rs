use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Malformed function description; `position` is a byte offset into the input.
    Syntax { position: usize, message: String },
    /// A parameter is outside the range accepted by the operation.
    OutOfRange { what: &'static str, message: String },
    /// The requested spectrum or level cannot be resolved on the grid.
    UnderResolved(String),
    /// Grid functions or sets of incompatible shape were combined.
    Shape(String),
    /// The samples behind a `file` function spec could not be obtained.
    MissingSamples(String),
    /// Operation needs a non-degenerate input (e.g. nonzero seminorm).
    Degenerate(&'static str),
}

impl Error {
    pub(crate) fn range(what: &'static str, message: impl Into<String>) -> Self {
        Error::OutOfRange {
            what,
            message: message.into(),
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Syntax { position, message } => {
                write!(f, "syntax error at position {position}: {message}")
            }
            Error::OutOfRange { what, message } => write!(f, "{what} out of range: {message}"),
            Error::UnderResolved(msg) => write!(f, "under-resolved: {msg}"),
            Error::Shape(msg) => write!(f, "shape mismatch: {msg}"),
            Error::MissingSamples(msg) => write!(f, "file samples unavailable: {msg}"),
            Error::Degenerate(what) => write!(f, "degenerate input: {what}"),
        }
    }
}

impl core::error::Error for Error {}

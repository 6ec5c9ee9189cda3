use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Malformed measure spec. `position` is a byte offset into the spec.
    #[error("parse error at position {position}: {message} (near `{token}`)")]
    Parse {
        position: usize,
        token: String,
        message: String,
    },

    #[error("degenerate measure: {0}")]
    Degenerate(String),

    /// An argument outside the domain of a functional (0/0, y = 0, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A hypothesis of a check is violated (asymmetric reference, Dirac mass at 0, ...).
    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("invalid config field `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Arguments outside the domain of an operation.
    #[error("domain: {0}")]
    Domain(String),

    /// A target slope on the boundary of `[1, 3]`, reachable only as a limit.
    #[error("boundary: {reason}; {advice}")]
    Boundary { reason: String, advice: String },

    /// A checked inequality or identity failed.
    #[error("verification: {0}")]
    Verification(String),

    #[error("parse: {0}")]
    Parse(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// Short machine-readable tag for the error class.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::Boundary { .. } => "boundary",
            Error::Verification(_) => "verification",
            Error::Parse(_) => "parse",
            Error::Io(_) => "io",
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_) | Error::Boundary { .. } | Error::Parse(_) => 1,
            Error::Verification(_) => 2,
            Error::Io(_) => 3,
        }
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(std::io::Error::other(e.to_string()))
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(std::io::Error::other(e.to_string()))
    }
}

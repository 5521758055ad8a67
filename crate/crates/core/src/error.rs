use std::path::PathBuf;

/// Failure categories surfaced by every module in the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A numeric argument outside its allowed domain.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// A lookup outside a bounded domain (e.g. intensity without wraparound).
    #[error("out of range: {0}")]
    Range(String),

    /// Malformed input data with location context.
    #[error("{source_name}:{line}: {message}")]
    Parse { source_name: String, line: u64, message: String },

    /// Inconsistent or missing configuration.
    #[error("configuration: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// A conservation or consistency check failed after a run.
    #[error("invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    pub fn parameter(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub fn parse(source_name: impl Into<String>, line: u64, message: impl Into<String>) -> Self {
        Error::Parse { source_name: source_name.into(), line, message: message.into() }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    /// Short machine-readable category name.
    pub fn category(&self) -> &'static str {
        match self {
            Error::Parameter(_) => "parameter",
            Error::Range(_) => "range",
            Error::Parse { .. } => "parse",
            Error::Config(_) => "config",
            Error::Io { .. } => "io",
            Error::Invariant(_) => "invariant",
        }
    }

    /// Process exit status for the command-line front end.
    ///
    /// 1: usage/config, 2: input parse (including unreadable inputs),
    /// 3: internal invariant violation.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parameter(_) | Error::Range(_) | Error::Config(_) => 1,
            Error::Parse { .. } | Error::Io { .. } => 2,
            Error::Invariant(_) => 3,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

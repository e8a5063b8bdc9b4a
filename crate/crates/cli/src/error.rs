use thiserror::Error;

/// Failures of a command, each mapped to a process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),

    /// A configuration field is missing, malformed or inconsistent.
    #[error("config: {field}: {message}")]
    Config { field: String, message: String },

    #[error(transparent)]
    Numeric(quarkonium_core::Error),

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("i/o: {0}")]
    Io(String),

    /// The reader of standard output went away, as with `| head`.
    #[error("broken pipe")]
    BrokenPipe,
}

impl CliError {
    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    /// 0 success, 1 usage or config, 2 numeric, 3 validation.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Config { .. } | CliError::Io(_) => 1,
            CliError::BrokenPipe => 0,
            CliError::Numeric(_) => 2,
            CliError::Validation(_) => 3,
        }
    }
}

impl From<quarkonium_core::Error> for CliError {
    fn from(e: quarkonium_core::Error) -> Self {
        match e {
            quarkonium_core::Error::Io { kind, message } => std::io::Error::new(kind, message).into(),
            e => CliError::Numeric(e),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        match e.kind() {
            std::io::ErrorKind::BrokenPipe => CliError::BrokenPipe,
            _ => CliError::Io(e.to_string()),
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        let message = e.to_string();
        match e.into_kind() {
            csv::ErrorKind::Io(io) => io.into(),
            _ => CliError::Io(message),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

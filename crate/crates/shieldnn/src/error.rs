use std::path::PathBuf;

/// Process exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitCode {
    Success = 0,
    /// Refuted, inconclusive, unsafe or otherwise failed on the merits.
    Domain = 1,
    /// Bad arguments, malformed input, I/O.
    Usage = 2,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("{path}: expected schema {expected}, found {found}")]
    Schema {
        path: PathBuf,
        expected: &'static str,
        found: String,
    },
    #[error("{0}")]
    Usage(String),
    #[error("provenance check failed: {0}")]
    Provenance(String),
    #[error(transparent)]
    Core(#[from] shieldnn_core::Error),
    #[error("{0}")]
    Domain(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Io { .. }
            | CliError::Json { .. }
            | CliError::Csv { .. }
            | CliError::Schema { .. }
            | CliError::Usage(_) => ExitCode::Usage,
            CliError::Core(shieldnn_core::Error::InvalidParams(_) | shieldnn_core::Error::Config(_)) => ExitCode::Usage,
            CliError::Provenance(_) | CliError::Core(_) | CliError::Domain(_) => ExitCode::Domain,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("budget exceeded: {0}")]
    Budget(String),

    #[error("certification failed: {0}")]
    Certification(String),

    #[error(transparent)]
    Core(mfld::Error),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("output error: {0}")]
    Output(String),
}

impl CliError {
    /// Process exit status for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Budget(_) => 3,
            CliError::Certification(_) => 4,
            CliError::Core(_) | CliError::Io(_) | CliError::Output(_) => 1,
        }
    }
}

impl From<mfld::Error> for CliError {
    fn from(e: mfld::Error) -> Self {
        use mfld::Error as E;
        match e {
            E::Budget(msg) => CliError::Budget(msg),
            E::OutsideConvergence { .. } => CliError::Certification(e.to_string()),
            E::Parse { .. } | E::DimensionMismatch { .. } | E::InvalidDimension(_) | E::UnsupportedBackend(_) => {
                CliError::Config(e.to_string())
            }
            other => CliError::Core(other),
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Output(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Output(e.to_string())
    }
}

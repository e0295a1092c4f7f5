use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, bad config file, or parameters outside their domain.
    #[error("{0}")]
    Usage(String),
    /// Simulation or I/O failure after the configuration was accepted.
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

pub fn runtime(e: sqzent_core::Error) -> CliError {
    CliError::Runtime(e.to_string())
}

pub fn usage(e: sqzent_core::Error) -> CliError {
    CliError::Usage(e.to_string())
}

use thiserror::Error;

/// Exit status for a rejected configuration.
pub const EXIT_CONFIG: i32 = 2;
/// Exit status for a failure after the configuration was accepted.
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Internal(_) => EXIT_INTERNAL,
        }
    }
}

impl From<selfadj_core::Error> for CliError {
    fn from(e: selfadj_core::Error) -> Self {
        match e {
            selfadj_core::Error::Io(_) | selfadj_core::Error::Json(_) => {
                CliError::Internal(e.to_string())
            }
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Internal(e.to_string())
    }
}

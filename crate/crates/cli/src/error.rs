use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, config values or grids. Exit status 1.
    #[error("usage: {0}")]
    Usage(String),
    /// Numerical or I/O failure while running. Exit status 2.
    #[error(transparent)]
    Runtime(#[from] anyhow::Error),
}

impl CliError {
    pub fn usage(field: &str, msg: impl std::fmt::Display) -> Self {
        CliError::Usage(format!("invalid {field}: {msg}"))
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Runtime(_) => 2,
        }
    }
}

impl From<symquat::Error> for CliError {
    fn from(e: symquat::Error) -> Self {
        CliError::Runtime(e.into())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.into())
    }
}

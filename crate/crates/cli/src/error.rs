use std::fmt;

/// Command failure with its process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad arguments, configuration or I/O (exit code 2).
    Usage(anyhow::Error),
    /// Model, sampler or oracle failure (exit code 1).
    Failure(anyhow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Failure(_) => 1,
        }
    }

    pub fn usage(msg: impl fmt::Display) -> Self {
        CliError::Usage(anyhow::anyhow!("{msg}"))
    }

    pub fn failure(msg: impl fmt::Display) -> Self {
        CliError::Failure(anyhow::anyhow!("{msg}"))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(e) | CliError::Failure(e) => write!(f, "{e:#}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<proxmcmc::Error> for CliError {
    fn from(e: proxmcmc::Error) -> Self {
        match e {
            proxmcmc::Error::Io(_) | proxmcmc::Error::Parse(_) => CliError::Usage(e.into()),
            other => CliError::Failure(other.into()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Usage(e.into())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Usage(e.into())
    }
}

/// Configuration errors are usage errors.
impl From<anyhow::Error> for CliError {
    fn from(e: anyhow::Error) -> Self {
        CliError::Usage(e)
    }
}

pub type CliResult<T> = Result<T, CliError>;

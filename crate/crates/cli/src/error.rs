use std::path::Path;

use causal_bde::Error as CoreError;

/// Failure of one CLI run, grouped by exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad flags or flag combinations (exit 2).
    #[error("{0}")]
    Usage(String),
    /// Unreadable or inconsistent input (exit 3).
    #[error("{0}")]
    Data(String),
    /// A configured size limit was hit (exit 4).
    #[error("{0}")]
    Cap(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Data(_) => 3,
            CliError::Cap(_) => 4,
        }
    }

    /// Prefixes the message with `path`.
    pub fn in_file(self, path: &Path) -> Self {
        let at = path.display();
        match self {
            CliError::Usage(m) => CliError::Usage(format!("{at}: {m}")),
            CliError::Data(m) => CliError::Data(format!("{at}: {m}")),
            CliError::Cap(m) => CliError::Cap(format!("{at}: {m}")),
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::TooManyCompletions { .. }
            | CoreError::StateSpaceTooLarge { .. }
            | CoreError::CapExceeded { .. } => CliError::Cap(e.to_string()),
            CoreError::InterventionInAcausalMode { .. } => CliError::Usage(e.to_string()),
            _ => CliError::Data(e.to_string()),
        }
    }
}

pub fn io_error(path: &Path, e: std::io::Error) -> CliError {
    CliError::Data(format!("{}: {e}", path.display()))
}

pub type CliResult<T> = Result<T, CliError>;

use semigroup_core::Error as CoreError;

/// Failures that end a run, each mapped to an exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("input error: {0}")]
    Input(String),
    #[error("numerical error: {0}")]
    Numerical(String),
    #[error("io error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) | CliError::Io(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::Input(m) => CliError::Input(m),
            CoreError::Numerical(m) => CliError::Numerical(m),
            CoreError::Construction(m) => CliError::Numerical(format!("construction failed: {m}")),
        }
    }
}

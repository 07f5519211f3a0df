use thiserror::Error;

/// Failures surfaced by the command line; each maps to an exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad spec, config or flag. Exit code 2.
    #[error("{0}")]
    Validation(String),
    /// Anything else, including IO. Exit code 1.
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Internal(_) => 1,
        }
    }
}

impl From<lipdist_core::Error> for CliError {
    fn from(e: lipdist_core::Error) -> Self {
        use lipdist_core::Error as E;
        match e {
            E::Syntax { .. } | E::OutOfRange { .. } | E::UnderResolved(_) | E::MissingSamples(_) | E::Shape(_) => {
                CliError::Validation(e.to_string())
            }
            E::Degenerate(_) => CliError::Internal(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Internal(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Internal(e.to_string())
    }
}

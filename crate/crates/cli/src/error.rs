use thiserror::Error;

/// Failures surfaced by the command line, grouped by exit status.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad configuration or arguments. Exit status 1.
    #[error("validation error: {0}")]
    Validation(String),
    /// A numerical routine failed or a check did not pass. Exit status 2.
    #[error("numerical failure: {0}")]
    Numeric(String),
    /// Reading or writing a file failed. Exit status 3.
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Numeric(_) => 2,
            CliError::Io(_) => 3,
        }
    }

    /// Wraps a model error, prefixing parameter names with the config section.
    pub fn from_model(err: udwi_core::Error, section: &str) -> Self {
        use udwi_core::Error as E;
        match err {
            E::InvalidParameter { name, reason } => {
                CliError::Validation(format!("{section}.{name}: {reason}"))
            }
            E::QuadratureNotConverged { .. } | E::InfraredSingular { .. } => {
                CliError::Numeric(err.to_string())
            }
            other => CliError::Validation(format!("{section}: {other}")),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

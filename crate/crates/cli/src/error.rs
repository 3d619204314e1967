use appint::appint::{AppintError, AppintErrorKind};
use appint::bezout::BezoutError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Io(String),
    #[error("config parse error: {0}")]
    Parse(String),
    #[error("invalid configuration: {0}")]
    Validation(String),
    #[error("coprimality failure at level {level}: margin {margin:e}")]
    Coprimality { level: usize, margin: f64 },
    #[error("tolerance exceeded: {0}")]
    Tolerance(String),
    #[error("{0}")]
    Failure(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) | CliError::Validation(_) => 2,
            CliError::Coprimality { .. } => 3,
            CliError::Tolerance(_) => 4,
            CliError::Io(_) | CliError::Failure(_) => 1,
        }
    }
}

impl From<&AppintError> for CliError {
    fn from(e: &AppintError) -> Self {
        let level = e.level;
        match &e.kind {
            AppintErrorKind::CoprimalityFailure { margin } => CliError::Coprimality { level, margin: *margin },
            AppintErrorKind::Bezout(BezoutError::SingularSystem { margin }) => {
                CliError::Coprimality { level, margin: *margin }
            }
            AppintErrorKind::Bezout(BezoutError::CommonRoot { .. }) => CliError::Coprimality { level, margin: 0.0 },
            AppintErrorKind::SolverDisagreement { .. } | AppintErrorKind::ResidualTooLarge { .. } => {
                CliError::Tolerance(e.to_string())
            }
            AppintErrorKind::SelectionOutOfRange { .. }
            | AppintErrorKind::MissingSelection
            | AppintErrorKind::Program(_)
            | AppintErrorKind::Bezout(BezoutError::IndexOutOfRange { .. } | BezoutError::DegreeZero) => {
                CliError::Validation(e.to_string())
            }
            _ => CliError::Failure(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

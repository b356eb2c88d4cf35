use thiserror::Error;

/// Errors surfaced by the command-line front end.
#[derive(Debug, Error)]
pub enum LabError {
    /// Bad flags or inconsistent parameters; exit status 2.
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(chowla_core::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    /// A check or invariant failed at run time.
    #[error("{0}")]
    Failed(String),
}

impl LabError {
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Usage(_) => 2,
            _ => 1,
        }
    }

    /// Short machine-readable category used in error messages.
    pub fn kind(&self) -> &'static str {
        use chowla_core::Error as E;
        match self {
            LabError::Usage(_) => "usage",
            LabError::Core(E::Capacity(_)) => "capacity",
            LabError::Core(E::Overflow(_)) => "overflow",
            LabError::Core(E::Range { .. }) => "range",
            LabError::Core(E::Axiom { .. } | E::Degenerate { .. }) => "axiom",
            LabError::Core(_) => "input",
            LabError::Io(_) => "io",
            LabError::Csv(_) | LabError::Json(_) => "format",
            LabError::Failed(_) => "check",
        }
    }
}

impl From<chowla_core::Error> for LabError {
    fn from(e: chowla_core::Error) -> Self {
        use chowla_core::Error as E;
        match e {
            E::InvalidInput(_) | E::InvalidDiscriminant { .. } | E::Precondition(_) => {
                LabError::Usage(e.to_string())
            }
            other => LabError::Core(other),
        }
    }
}

pub type LabResult<T> = Result<T, LabError>;

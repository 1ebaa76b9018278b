use thiserror::Error;

/// Errors surfaced by the library.
#[derive(Debug, Error)]
pub enum LayerpotError {
    #[error("invalid shape: {0}")]
    InvalidShape(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("eigensolver failure: {0}")]
    SolverFailure(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(String),
}

impl From<csv::Error> for LayerpotError {
    fn from(e: csv::Error) -> Self {
        LayerpotError::Csv(e.to_string())
    }
}

use groves_core::GrovesError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Core(#[from] GrovesError),

    #[error("fixture mismatch: {0}")]
    FixtureMismatch(String),

    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(e) if is_input_error(e) => 2,
            CliError::FixtureMismatch(_) => 3,
            _ => 1,
        }
    }
}

/// Errors caused by what was typed rather than by the analysis itself.
fn is_input_error(e: &GrovesError) -> bool {
    matches!(
        e,
        GrovesError::InvalidSetting(_)
            | GrovesError::InvalidProfile(_)
            | GrovesError::InvalidOelIndex { .. }
            | GrovesError::InvalidGrid(_)
            | GrovesError::DomainMismatch(_)
            | GrovesError::UnsupportedStrategy(_)
            | GrovesError::Parse(_)
            | GrovesError::IndexOutOfRange { .. }
    )
}

pub type CliResult<T> = std::result::Result<T, CliError>;

use thiserror::Error;

/// Errors shared across the library.
#[derive(Debug, Error)]
pub enum EcdError {
    #[error("non-finite value encountered in {0}")]
    NonFiniteValue(&'static str),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("initial shifted loss must be positive, got V0 = {0}")]
    NonPositiveInitialLoss(f64),

    #[error("evolution diverged: {0}")]
    Diverged(String),

    #[error("epsilon calibration failed: {0}")]
    CalibrationFailed(String),

    #[error("domain error: {0}")]
    DomainError(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("hyperparameter search failed: {0}")]
    SearchFailed(String),

    #[error("invalid hyperparameters: {0}")]
    InvalidHyperParams(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("minimum refinement failed: {0}")]
    RefinementFailed(String),
}

pub type Result<T> = std::result::Result<T, EcdError>;

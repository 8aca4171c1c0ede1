use thiserror::Error;

/// Failures of the post-processing routines.
#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("signal too short: need at least {needed} samples, got {got}")]
    TooShort { needed: usize, got: usize },
    #[error("{0}")]
    InvalidArgument(String),
    #[error("configs differ beyond the scheduler in `{0}`")]
    ConfigMismatch(String),
    #[error("scenario m={modulation_index} ({scheduler}) failed: {source}")]
    Scenario {
        modulation_index: f64,
        scheduler: &'static str,
        source: Box<AnalysisError>,
    },
    #[error(transparent)]
    Model(#[from] ripplemod_core::Error),
}

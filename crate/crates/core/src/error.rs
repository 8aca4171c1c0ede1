use alloc::string::String;

/// Errors raised by the core models.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("module count {0} outside the supported range 1..=12")]
    ModuleCount(usize),
    #[error("invalid module label `{0}`")]
    InvalidLabel(String),
    #[error("infeasible string state: {0}")]
    InfeasibleState(String),
    #[error("state length mismatch: {left} vs {right} modules")]
    LengthMismatch { left: usize, right: usize },
    #[error("singular linear system (dimension {0})")]
    Singular(usize),
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("level {level} outside [-{n}, {n}]")]
    LevelOutOfRange { level: i32, n: usize },
    #[error("state `{0}` missing from look-up table")]
    TableMiss(String),
    #[error("no state at level {level} within {max_toggles} toggles of `{prev}`")]
    NoCandidate {
        level: i32,
        prev: String,
        max_toggles: u32,
    },
    #[error("explicit step {dt:e} s unstable for fastest time constant {tau:e} s")]
    UnstableStep { dt: f64, tau: f64 },
    #[error("empty input: {0}")]
    Empty(&'static str),
    #[error("invalid config field `{field}`: {reason}")]
    Config { field: String, reason: String },
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}

use std::fs;
use std::path::{Path, PathBuf};

use ripplemod_core::sim::ScenarioConfig;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot parse config")]
    Parse(#[from] toml::de::Error),
    #[error("invalid config field `{field}`: {reason}")]
    Invalid { field: String, reason: String },
}

/// Parses and validates a TOML scenario. Missing keys take their defaults
/// and unknown keys are rejected.
pub fn parse_config(text: &str) -> Result<ScenarioConfig, ConfigError> {
    let config: ScenarioConfig = toml::from_str(text)?;
    config.validate().map_err(|e| match e {
        ripplemod_core::Error::Config { field, reason } => ConfigError::Invalid { field, reason },
        other => ConfigError::Invalid {
            field: "config".into(),
            reason: other.to_string(),
        },
    })?;
    Ok(config)
}

pub fn load_config(path: &Path) -> Result<ScenarioConfig, ConfigError> {
    let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_owned(),
        source,
    })?;
    parse_config(&text)
}

pub fn to_toml(config: &ScenarioConfig) -> String {
    toml::to_string(config).expect("scenario configs always serialize")
}

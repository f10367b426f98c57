use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Deserialize;

use crate::cli::Format;

/// Values read from `--config`; every field mirrors a flag of the same name.
#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub tol: Option<f64>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub pair: Option<String>,
    pub triple: Option<String>,
    pub start: Option<String>,
    pub points: Option<usize>,
    pub tomography: Option<bool>,
    pub shots: Option<u64>,
    pub exact: Option<bool>,
    pub noise: Option<f64>,
    pub resolution: Option<usize>,
    pub starts: Option<usize>,
}

#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text)
            .map_err(|e| ConfigError(format!("config {}: {e}", path.display())).into())
    }
}

/// Flag, else config value, else default.
pub fn pick<T: Clone>(flag: Option<T>, config: &Option<T>, default: T) -> T {
    flag.or_else(|| config.clone()).unwrap_or(default)
}

pub fn positive_tol(tol: f64) -> Result<f64> {
    if tol.is_finite() && tol > 0.0 {
        Ok(tol)
    } else {
        Err(ConfigError(format!("tolerance must be positive, got {tol}")).into())
    }
}

/// Splits a comma-separated channel list. Parametric fixture names keep
/// their own numeric arguments: `rotation:0,0,1,1.2,E1` is two channels.
pub fn split_channels(list: &str) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    let mut pending = 0usize;
    for tok in list.split(',').map(str::trim) {
        if pending > 0 {
            let last = out.last_mut().unwrap();
            last.push(',');
            last.push_str(tok);
            pending -= 1;
            continue;
        }
        let lower = tok.to_ascii_lowercase();
        if lower.starts_with("rotation:") {
            pending = 3;
        }
        out.push(tok.to_string());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn channel_lists_keep_rotation_arguments() {
        assert_eq!(split_channels("E1,E2"), ["E1", "E2"]);
        assert_eq!(
            split_channels("rotation:0,0,1,1.5, depolarizing:0.5,E3"),
            ["rotation:0,0,1,1.5", "depolarizing:0.5", "E3"]
        );
    }

    #[test]
    fn flags_override_config() {
        assert_eq!(pick(Some(3), &Some(5), 7), 3);
        assert_eq!(pick(None, &Some(5), 7), 5);
        assert_eq!(pick(None, &None, 7), 7);
    }

    #[test]
    fn unknown_config_keys_are_rejected() {
        assert!(serde_json::from_str::<RunConfig>(r#"{"sead": 1}"#).is_err());
        let c: RunConfig = serde_json::from_str(r#"{"seed": 4, "format": "json"}"#).unwrap();
        assert_eq!(c.seed, Some(4));
        assert_eq!(c.format, Some(Format::Json));
    }
}

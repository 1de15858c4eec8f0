use std::path::Path;

use anyhow::{Context, Result};
use serde::Deserialize;

/// Defaults read from an optional TOML file. Command-line flags win.
#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub seed: Option<u64>,
    pub questions: Option<usize>,
    pub allow_duplicates: Option<bool>,
    pub tolerance: Option<f64>,
    pub family: Option<String>,
}

impl Config {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }
}

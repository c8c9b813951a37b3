//! Detector configuration from TOML files and command-line overrides.

use std::path::Path;

use refaware_core::DetectorConfig;
use serde::Deserialize;

use crate::error::{Error, Result};

/// Keys accepted in a configuration file; each is optional and overrides the default.
#[derive(Debug, Clone, Copy, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigOverrides {
    pub tau_match: Option<f64>,
    pub tau_extract: Option<f64>,
    pub min_extract_tokens: Option<usize>,
    pub idf_smoothing: Option<f64>,
}

impl ConfigOverrides {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Fields set in `other` win.
    pub fn merge(self, other: ConfigOverrides) -> Self {
        Self {
            tau_match: other.tau_match.or(self.tau_match),
            tau_extract: other.tau_extract.or(self.tau_extract),
            min_extract_tokens: other.min_extract_tokens.or(self.min_extract_tokens),
            idf_smoothing: other.idf_smoothing.or(self.idf_smoothing),
        }
    }

    /// Applies the overrides to the defaults and validates the result.
    pub fn resolve(self) -> Result<DetectorConfig> {
        let d = DetectorConfig::default();
        let cfg = DetectorConfig {
            tau_match: self.tau_match.unwrap_or(d.tau_match),
            tau_extract: self.tau_extract.unwrap_or(d.tau_extract),
            min_extract_tokens: self.min_extract_tokens.unwrap_or(d.min_extract_tokens),
            idf_smoothing: self.idf_smoothing.unwrap_or(d.idf_smoothing),
        };
        cfg.validate().map_err(|e| Error::Config(e.to_string()))?;
        Ok(cfg)
    }
}

//! Run configuration: defaults, optional TOML file, flag overrides.

use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog::Dialect;
use crate::inference::{InferenceConfig, Mode, DEFAULT_CONFIDENCE, DEFAULT_CONFIDENCE_COEFF};
use crate::sampler::{SamplerConfig, SamplingPolicy, DEFAULT_BINS, DEFAULT_ROWS_MIN};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("invalid value {value} for {key}: expected {expected}")]
    OutOfRange { key: String, value: String, expected: String },
    #[error("unknown key{} in config file: {}", if .0.len() == 1 { "" } else { "s" }, .0.join(", "))]
    UnknownKeys(Vec<String>),
    #[error("invalid {key}: {message}")]
    Invalid { key: String, message: String },
    #[error("cannot parse config file {0}: {1}")]
    Parse(String, String),
    #[error("cannot read config file {0}: {1}")]
    Io(String, #[source] std::io::Error),
}

impl ConfigError {
    pub fn out_of_range(key: &str, value: impl Display, expected: &str) -> Self {
        ConfigError::OutOfRange { key: key.to_string(), value: value.to_string(), expected: expected.to_string() }
    }

    pub fn invalid(key: &str, message: impl Display) -> Self {
        ConfigError::Invalid { key: key.to_string(), message: message.to_string() }
    }
}

/// Fully resolved settings for one analysis run. Serialized verbatim into
/// the run report so a run can be repeated exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisConfig {
    pub dialect: Dialect,
    pub confidence: f64,
    pub confidence_coeff: f64,
    pub mode: Mode,
    pub rows_min: u64,
    pub policy: SamplingPolicy,
    pub histogram_bins: usize,
    pub language: String,
    pub pack_dir: Option<PathBuf>,
    pub seed: u64,
    pub same_table_pairs: bool,
    pub key_fallback: bool,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            dialect: Dialect::Postgres,
            confidence: DEFAULT_CONFIDENCE,
            confidence_coeff: DEFAULT_CONFIDENCE_COEFF,
            mode: Mode::Balance,
            rows_min: DEFAULT_ROWS_MIN,
            policy: SamplingPolicy::LiteralEq1,
            histogram_bins: DEFAULT_BINS,
            language: "en".to_string(),
            pack_dir: None,
            seed: 0,
            same_table_pairs: false,
            key_fallback: true,
        }
    }
}

impl AnalysisConfig {
    pub fn inference(&self) -> InferenceConfig {
        InferenceConfig {
            confidence: self.confidence,
            confidence_coeff: self.confidence_coeff,
            mode: self.mode,
            rows_min: self.rows_min,
            language: self.language.clone(),
            seed: self.seed,
            same_table_pairs: self.same_table_pairs,
            key_fallback: self.key_fallback,
        }
    }

    /// Sampler settings after the mode has adjusted `rows_min`.
    pub fn sampler(&self) -> SamplerConfig {
        SamplerConfig {
            rows_min: self.mode.effective_rows_min(self.rows_min),
            policy: self.policy,
            seed: self.seed,
            histogram_bins: self.histogram_bins,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.inference().validate()?;
        if let SamplingPolicy::FixedReservoir(0) = self.policy {
            return Err(ConfigError::out_of_range("policy", "fixed:0", "fixed:N with N >= 1"));
        }
        if self.histogram_bins == 0 {
            return Err(ConfigError::out_of_range("bins", 0, "bins >= 1"));
        }
        Ok(())
    }

    pub fn apply(&mut self, layer: &ConfigLayer) {
        macro_rules! take {
            ($($field:ident),*) => {
                $(if let Some(v) = &layer.$field { self.$field = v.clone(); })*
            };
        }
        take!(dialect, confidence, confidence_coeff, mode, rows_min, policy, histogram_bins, language, seed, same_table_pairs, key_fallback);
        if let Some(dir) = &layer.pack_dir {
            self.pack_dir = Some(dir.clone());
        }
    }
}

/// A partial configuration: one config file or one set of command-line flags.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ConfigLayer {
    pub dialect: Option<Dialect>,
    pub confidence: Option<f64>,
    pub confidence_coeff: Option<f64>,
    pub mode: Option<Mode>,
    pub rows_min: Option<u64>,
    pub policy: Option<SamplingPolicy>,
    pub histogram_bins: Option<usize>,
    pub language: Option<String>,
    pub pack_dir: Option<PathBuf>,
    pub seed: Option<u64>,
    pub same_table_pairs: Option<bool>,
    pub key_fallback: Option<bool>,
}

const KNOWN_KEYS: &[&str] = &[
    "dialect",
    "confidence",
    "confidence_coeff",
    "mode",
    "rows_min",
    "policy",
    "histogram_bins",
    "language",
    "pack_dir",
    "seed",
    "same_table_pairs",
    "key_fallback",
];

impl ConfigLayer {
    /// Parses TOML text, rejecting every key it does not know.
    pub fn from_toml(text: &str, origin: &str) -> Result<Self, ConfigError> {
        let table: toml::Table = text.parse().map_err(|e: toml::de::Error| ConfigError::Parse(origin.to_string(), e.message().to_string()))?;
        let mut unknown: Vec<String> = table.keys().filter(|k| !KNOWN_KEYS.contains(&k.as_str())).cloned().collect();
        if !unknown.is_empty() {
            unknown.sort();
            return Err(ConfigError::UnknownKeys(unknown));
        }
        let mut layer = ConfigLayer::default();
        for (key, value) in table {
            let bad = |expected: &str| ConfigError::out_of_range(&key, &value, expected);
            match key.as_str() {
                "dialect" => {
                    let s = value.as_str().ok_or_else(|| bad("a string"))?;
                    layer.dialect = Some(s.parse().map_err(|e| ConfigError::invalid("dialect", e))?);
                }
                "mode" => {
                    let s = value.as_str().ok_or_else(|| bad("a string"))?;
                    layer.mode = Some(s.parse().map_err(|e| ConfigError::invalid("mode", e))?);
                }
                "policy" => {
                    let s = value.as_str().ok_or_else(|| bad("a string"))?;
                    layer.policy = Some(s.parse().map_err(|e| ConfigError::invalid("policy", e))?);
                }
                "language" => layer.language = Some(value.as_str().ok_or_else(|| bad("a string"))?.to_string()),
                "pack_dir" => layer.pack_dir = Some(PathBuf::from(value.as_str().ok_or_else(|| bad("a path"))?)),
                "confidence" => layer.confidence = Some(as_float(&value).ok_or_else(|| bad("a number"))?),
                "confidence_coeff" => layer.confidence_coeff = Some(as_float(&value).ok_or_else(|| bad("a number"))?),
                "rows_min" => layer.rows_min = Some(as_count(&value).ok_or_else(|| bad("a non-negative integer"))?),
                "seed" => layer.seed = Some(as_count(&value).ok_or_else(|| bad("a non-negative integer"))?),
                "histogram_bins" => {
                    layer.histogram_bins = Some(as_count(&value).ok_or_else(|| bad("a non-negative integer"))? as usize)
                }
                "same_table_pairs" => layer.same_table_pairs = Some(value.as_bool().ok_or_else(|| bad("true or false"))?),
                "key_fallback" => layer.key_fallback = Some(value.as_bool().ok_or_else(|| bad("true or false"))?),
                _ => unreachable!("checked against KNOWN_KEYS"),
            }
        }
        Ok(layer)
    }

    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path).map_err(|e| ConfigError::Io(path.display().to_string(), e))?;
        Self::from_toml(&text, &path.display().to_string())
    }
}

fn as_float(v: &toml::Value) -> Option<f64> {
    v.as_float().or_else(|| v.as_integer().map(|i| i as f64))
}

fn as_count(v: &toml::Value) -> Option<u64> {
    v.as_integer().and_then(|i| u64::try_from(i).ok())
}

/// Defaults, then the file (if any), then the flags; validated.
pub fn load_config(file: Option<&Path>, flags: &ConfigLayer) -> Result<AnalysisConfig, ConfigError> {
    let mut config = AnalysisConfig::default();
    if let Some(path) = file {
        config.apply(&ConfigLayer::from_file(path)?);
    }
    config.apply(flags);
    config.validate()?;
    Ok(config)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let c = load_config(None, &ConfigLayer::default()).unwrap();
        assert_eq!(c.rows_min, 15000);
        assert_eq!(c.confidence, 0.95);
        assert_eq!(c.confidence_coeff, 0.05);
        assert_eq!(c.mode, Mode::Balance);
        assert_eq!(c.policy, SamplingPolicy::LiteralEq1);
    }

    #[test]
    fn flags_beat_file_beat_defaults() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("flower.toml");
        fs::write(&path, "confidence = 0.9\nrows_min = 100\nmode = \"accuracy\"\n").unwrap();
        let flags = ConfigLayer { confidence: Some(0.95), ..Default::default() };
        let c = load_config(Some(&path), &flags).unwrap();
        assert_eq!(c.confidence, 0.95);
        assert_eq!(c.rows_min, 100);
        assert_eq!(c.mode, Mode::Accuracy);
        assert_eq!(c.sampler().rows_min, 400);
    }

    #[test]
    fn unknown_keys_are_listed() {
        let err = ConfigLayer::from_toml("confidnce = 0.9\nzeta = 1\nseed = 3\n", "x").unwrap_err();
        match &err {
            ConfigError::UnknownKeys(keys) => assert_eq!(keys, &["confidnce", "zeta"]),
            other => panic!("{other:?}"),
        }
        assert!(err.to_string().contains("unknown key"));
    }

    #[test]
    fn out_of_range_names_the_key() {
        let flags = ConfigLayer { confidence: Some(1.5), ..Default::default() };
        let msg = load_config(None, &flags).unwrap_err().to_string();
        assert!(msg.contains("confidence") && msg.contains("0 <= confidence <= 1"), "{msg}");
        let err = ConfigLayer::from_toml("rows_min = -3", "x").unwrap_err();
        assert!(err.to_string().contains("rows_min"));
        let err = ConfigLayer::from_toml("policy = \"sometimes\"", "x").unwrap_err();
        assert!(err.to_string().contains("policy"));
    }

    #[test]
    fn integer_confidence_is_accepted() {
        let layer = ConfigLayer::from_toml("confidence = 1\npolicy = \"fixed:500\"", "x").unwrap();
        assert_eq!(layer.confidence, Some(1.0));
        assert_eq!(layer.policy, Some(SamplingPolicy::FixedReservoir(500)));
    }
}

//! `key = value` run configuration.
//!
//! Blank lines and lines starting with `#` are ignored. Unknown keys are an
//! error so typos do not silently fall back to defaults.

use std::fmt::Write as _;
use std::str::FromStr;

use crate::autoencoder::TrainConfig;
use crate::detector::{DetectorConfig, FeatureSet};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("`{key}`: invalid value `{value}`: {reason}")]
    BadValue {
        key: String,
        value: String,
        reason: String,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub window_width: f64,
    pub window_origin: f64,
    pub detector: DetectorConfig,
    pub features: FeatureSet,
    pub seed: u64,
    pub autoencoder: bool,
    pub ae_hidden: usize,
    pub ae_bottleneck: usize,
    pub train: TrainConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            window_width: 300.0,
            window_origin: 0.0,
            detector: DetectorConfig::default(),
            features: FeatureSet::default(),
            seed: 1,
            autoencoder: false,
            ae_hidden: 16,
            ae_bottleneck: 3,
            train: TrainConfig::default(),
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T, ConfigError>
where
    T::Err: std::fmt::Display,
{
    value.parse().map_err(|e: T::Err| ConfigError::BadValue {
        key: key.into(),
        value: value.into(),
        reason: e.to_string(),
    })
}

fn parse_bool(key: &str, value: &str) -> Result<bool, ConfigError> {
    match value {
        "on" | "true" | "yes" | "1" => Ok(true),
        "off" | "false" | "no" | "0" => Ok(false),
        _ => Err(ConfigError::BadValue {
            key: key.into(),
            value: value.into(),
            reason: "expected on/off".into(),
        }),
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = RunConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or(ConfigError::Syntax { line: i + 1 })?;
            let (key, value) = (key.trim(), value.trim());
            if !cfg.set(key, value)? {
                return Err(ConfigError::UnknownKey {
                    line: i + 1,
                    key: key.into(),
                });
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Applies one setting. Returns `Ok(false)` for an unknown key.
    pub fn set(&mut self, key: &str, value: &str) -> Result<bool, ConfigError> {
        match key {
            "capacity" => self.detector.capacity = parse(key, value)?,
            "window_width" => self.window_width = parse(key, value)?,
            "window_origin" => self.window_origin = parse(key, value)?,
            "max_eps" => self.detector.max_eps = parse(key, value)?,
            "max_dim" => self.detector.max_dim = parse(key, value)?,
            "quantile" => self.detector.quantile = parse(key, value)?,
            "features" => {
                self.features = FeatureSet::parse(value).map_err(|e| ConfigError::BadValue {
                    key: key.into(),
                    value: value.into(),
                    reason: e.to_string(),
                })?
            }
            "seed" => self.seed = parse(key, value)?,
            "autoencoder" => self.autoencoder = parse_bool(key, value)?,
            "ae_hidden" => self.ae_hidden = parse(key, value)?,
            "ae_bottleneck" => self.ae_bottleneck = parse(key, value)?,
            "ae_epochs" => self.train.epochs = parse(key, value)?,
            "ae_learning_rate" => self.train.learning_rate = parse(key, value)?,
            "ae_momentum" => self.train.momentum = parse(key, value)?,
            "ae_batch_size" => self.train.batch_size = parse(key, value)?,
            _ => return Ok(false),
        }
        Ok(true)
    }

    /// Range checks shared by file parsing and flag overrides.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |key: &str, value: String, reason: &str| ConfigError::BadValue {
            key: key.into(),
            value,
            reason: reason.into(),
        };
        if !(self.window_width > 0.0 && self.window_width.is_finite()) {
            return Err(bad("window_width", self.window_width.to_string(), "must be positive"));
        }
        if self.detector.capacity < 3 {
            return Err(bad("capacity", self.detector.capacity.to_string(), "must be at least 3"));
        }
        if !(self.detector.max_eps > 0.0 && self.detector.max_eps.is_finite()) {
            return Err(bad("max_eps", self.detector.max_eps.to_string(), "must be positive"));
        }
        let q = self.detector.quantile;
        if !(q > 0.0 && q <= 1.0) {
            return Err(bad("quantile", q.to_string(), "must be in (0, 1]"));
        }
        if self.ae_bottleneck >= self.features.len() {
            return Err(bad(
                "ae_bottleneck",
                self.ae_bottleneck.to_string(),
                "must be smaller than the number of features",
            ));
        }
        Ok(())
    }

    /// Serializes every key, in the same format [`RunConfig::parse`] reads.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "capacity = {}", self.detector.capacity);
        let _ = writeln!(out, "window_width = {}", self.window_width);
        let _ = writeln!(out, "window_origin = {}", self.window_origin);
        let _ = writeln!(out, "max_eps = {}", self.detector.max_eps);
        let _ = writeln!(out, "max_dim = {}", self.detector.max_dim);
        let _ = writeln!(out, "quantile = {}", self.detector.quantile);
        let _ = writeln!(out, "features = {}", self.features.names().join(","));
        let _ = writeln!(out, "seed = {}", self.seed);
        let _ = writeln!(out, "autoencoder = {}", if self.autoencoder { "on" } else { "off" });
        let _ = writeln!(out, "ae_hidden = {}", self.ae_hidden);
        let _ = writeln!(out, "ae_bottleneck = {}", self.ae_bottleneck);
        let _ = writeln!(out, "ae_epochs = {}", self.train.epochs);
        let _ = writeln!(out, "ae_learning_rate = {}", self.train.learning_rate);
        let _ = writeln!(out, "ae_momentum = {}", self.train.momentum);
        let _ = writeln!(out, "ae_batch_size = {}", self.train.batch_size);
        out
    }
}

//! The pipeline configuration file: one JSON document that can drive every
//! subcommand. All fields have defaults, so `{}` is a valid config and no
//! config file at all means "all defaults".

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::{Deserialize, Serialize};

use trackboost_core::boost::BoostMode;
use trackboost_core::tracker::TrackerConfig;
use trackboost_synth::SynthConfig;

use crate::error::{input, CliError};

/// Top-level configuration.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub tracker: TrackerConfig,
    pub boost_mode: BoostMode,
    pub eval: EvalSettings,
    /// Synthetic-data generation settings; only the `synth` subcommand
    /// reads this.
    pub synth: Option<SynthConfig>,
    /// Default file locations. Command-line flags override these.
    pub paths: PathDefaults,
}

/// Evaluation settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalSettings {
    pub iou_threshold: f64,
}

impl Default for EvalSettings {
    fn default() -> Self {
        Self { iou_threshold: 0.5 }
    }
}

/// Optional path defaults so a config file can drive a run on its own.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PathDefaults {
    pub detections: Option<PathBuf>,
    pub annotations: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub output_dir: Option<PathBuf>,
}

impl PipelineConfig {
    /// Loads a config file, or the defaults when no path is given.
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))
            .map_err(input)?;
        let config: Self = serde_json::from_str(&text)
            .with_context(|| format!("parsing config {}", path.display()))
            .map_err(input)?;
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<(), CliError> {
        self.tracker.validate().map_err(input)?;
        let t = self.eval.iou_threshold;
        if !(t.is_finite() && 0.0 < t && t <= 1.0) {
            return Err(input(anyhow::anyhow!(
                "eval.iou_threshold must lie in (0, 1], got {t}"
            )));
        }
        // Synth settings are validated by the generator itself, so configs
        // that only ever run tracking may leave the section half-filled.
        Ok(())
    }
}

/// Resolves a required path from flag or config default, naming the flag in
/// the error when neither is set.
pub fn require_path(
    flag_value: Option<PathBuf>,
    config_value: Option<&PathBuf>,
    flag: &str,
) -> Result<PathBuf, CliError> {
    flag_value
        .or_else(|| config_value.cloned())
        .ok_or_else(|| input(anyhow::anyhow!("missing {flag} (flag or config `paths` entry)")))
}

//! Generator configuration: asset lists, the randomization axes, and the
//! per-feature toggles that carve ablation variants out of one pipeline.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::SynthError;

/// Hard floor on the sampled sprite size. Anything smaller degenerates into
/// an invisible annotation.
pub const MIN_SPRITE_SIDE_PX: f64 = 4.0;

/// Ceiling on the sampled sprite size, as a fraction of the background's
/// shorter side.
pub const MAX_SPRITE_FRAC: f64 = 0.9;

/// Switches for the optional realism features. All off yields the plain
/// composite variant: randomized placement and lighting with no
/// post-processing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FeatureToggles {
    /// Film-grain noise after compositing.
    pub noise: bool,
    /// Draw the object size from the configured normal distribution instead
    /// of pinning it to `size_mean_px`.
    pub size_distribution: bool,
    /// Gaussian blur: the background-only pass before compositing and the
    /// global pass after it.
    pub blur: bool,
}

impl Default for FeatureToggles {
    fn default() -> Self {
        Self {
            noise: true,
            size_distribution: true,
            blur: true,
        }
    }
}

/// Everything that determines a generated dataset. Together with the seed
/// this is a complete recipe: the manifest embeds it so any dataset can be
/// regenerated bit-identically.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthConfig {
    /// Foreground object images; must carry an alpha channel to mean
    /// anything (opaque pixels composite as solid rectangles).
    pub sprite_paths: Vec<PathBuf>,
    /// Background scene images.
    pub background_paths: Vec<PathBuf>,
    pub num_samples: u32,
    /// Mean of the normal distribution over the object's longest side, px.
    pub size_mean_px: f64,
    /// Standard deviation of the size distribution, px.
    pub size_std_px: f64,
    /// Rotation is drawn uniformly from ±this many degrees.
    pub rotation_range_deg: f64,
    /// Background-only blur applied before compositing, px.
    pub blur_sigma_background: f64,
    /// Whole-frame blur applied after compositing, px.
    pub blur_sigma_global: f64,
    /// Film-grain standard deviation in [0,1] intensity units.
    pub grain_strength: f64,
    /// Multiplicative brightness factor range `[low, high]`, drawn per
    /// sample. Part of the base placement randomization, not a toggle.
    pub brightness_jitter: [f64; 2],
    pub feature_toggles: FeatureToggles,
    pub rng_seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        // Size and effect defaults are starting points, not measurements;
        // tune them against the footage the detector will actually see.
        Self {
            sprite_paths: Vec::new(),
            background_paths: Vec::new(),
            num_samples: 100,
            size_mean_px: 40.0,
            size_std_px: 10.0,
            rotation_range_deg: 180.0,
            blur_sigma_background: 1.5,
            blur_sigma_global: 0.5,
            grain_strength: 0.03,
            brightness_jitter: [0.7, 1.3],
            feature_toggles: FeatureToggles::default(),
            rng_seed: 0,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<(), SynthError> {
        fn require(ok: bool, field: &'static str, message: &str) -> Result<(), SynthError> {
            if ok {
                Ok(())
            } else {
                Err(SynthError::InvalidConfig {
                    field,
                    message: message.to_string(),
                })
            }
        }

        require(!self.sprite_paths.is_empty(), "sprite_paths", "need at least one sprite")?;
        require(
            !self.background_paths.is_empty(),
            "background_paths",
            "need at least one background",
        )?;
        require(self.num_samples >= 1, "num_samples", "must be at least 1")?;
        require(
            self.size_mean_px.is_finite() && self.size_mean_px > 0.0,
            "size_mean_px",
            "must be positive and finite",
        )?;
        require(
            self.size_std_px.is_finite() && self.size_std_px >= 0.0,
            "size_std_px",
            "must be non-negative and finite",
        )?;
        require(
            self.rotation_range_deg.is_finite() && self.rotation_range_deg >= 0.0,
            "rotation_range_deg",
            "must be non-negative and finite",
        )?;
        require(
            self.blur_sigma_background.is_finite() && self.blur_sigma_background >= 0.0,
            "blur_sigma_background",
            "must be non-negative and finite",
        )?;
        require(
            self.blur_sigma_global.is_finite() && self.blur_sigma_global >= 0.0,
            "blur_sigma_global",
            "must be non-negative and finite",
        )?;
        require(
            self.grain_strength.is_finite() && self.grain_strength >= 0.0,
            "grain_strength",
            "must be non-negative and finite",
        )?;
        let [lo, hi] = self.brightness_jitter;
        require(
            lo.is_finite() && hi.is_finite() && 0.0 <= lo && lo <= hi,
            "brightness_jitter",
            "must be a finite range [low, high] with 0 <= low <= high",
        )?;
        Ok(())
    }
}

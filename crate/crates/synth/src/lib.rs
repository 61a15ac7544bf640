//! Synthetic detection-data generation by 2D compositing.
//!
//! Small flying objects are expensive to annotate at scale, so this crate
//! manufactures labeled frames instead: alpha-masked object sprites are
//! scaled, rotated, and blended over real background photos, with the
//! annotation derived from the pixels the sprite actually covers. Three
//! optional realism features — film grain, a size distribution over the
//! object's longest side, and background/global Gaussian blur — can be
//! toggled independently to produce ablation variants of the same dataset.
//!
//! Generation is deterministic: every sample derives its own RNG streams
//! from `(rng_seed, sample_index)`, so a config plus seed is a complete,
//! repeatable recipe, and the manifest written next to the images records
//! exactly that.

use std::path::PathBuf;

use thiserror::Error;

pub mod compositor;
pub mod config;
pub mod dataset;
pub mod effects;
pub mod placement;

pub use compositor::{composite, Composite, ALPHA_SUPPORT_THRESHOLD};
pub use config::{FeatureToggles, SynthConfig, MAX_SPRITE_FRAC, MIN_SPRITE_SIDE_PX};
pub use dataset::{
    generate_dataset, grain_rng, placement_rng, read_manifest, DatasetManifest, DatasetSummary,
    SampleProvenance, MAX_PLACEMENT_ATTEMPTS, SYNTH_CLASS,
};
pub use effects::{apply_blur, apply_brightness, apply_grain};
pub use placement::{sample_placement, Placement};

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("synth config: {field} {message}")]
    InvalidConfig { field: &'static str, message: String },
    // Causes live in `source()` only, so cause-chain printers render them
    // exactly once.
    #[error("failed to read image {path}")]
    ImageRead {
        path: PathBuf,
        source: image::ImageError,
    },
    #[error("failed to write image {path}")]
    ImageWrite {
        path: PathBuf,
        source: image::ImageError,
    },
    #[error("io error at {path}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("background {width}x{height} is too small for the minimum {min} px sprite", min = MIN_SPRITE_SIDE_PX)]
    BackgroundTooSmall { width: u32, height: u32 },
    #[error(
        "transformed sprite needs {needed_w:.1}x{needed_h:.1} px but the background is {bg_w}x{bg_h}"
    )]
    DoesNotFit {
        needed_w: f64,
        needed_h: f64,
        bg_w: u32,
        bg_h: u32,
    },
    #[error("sample {sample_index}: no valid placement after {attempts} attempts")]
    PlacementExhausted { sample_index: u32, attempts: u32 },
    #[error(transparent)]
    Format(#[from] trackboost_core::formats::FormatError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

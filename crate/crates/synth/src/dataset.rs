//! Whole-dataset generation: seeds, retries, files on disk, and the
//! manifest that makes a dataset reproducible.

use std::fs;
use std::path::{Path, PathBuf};

use image::{RgbImage, RgbaImage};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use trackboost_core::formats::{write_coco_groundtruth, GroundTruthImage};
use trackboost_core::geometry::FrameSize;

use crate::compositor::composite;
use crate::config::{SynthConfig, MAX_SPRITE_FRAC, MIN_SPRITE_SIDE_PX};
use crate::effects::{apply_blur, apply_brightness, apply_grain};
use crate::placement::{sample_placement, Placement};
use crate::SynthError;

/// Placement attempts per sample before generation aborts.
pub const MAX_PLACEMENT_ATTEMPTS: u32 = 100;

/// The class every generated annotation carries.
pub const SYNTH_CLASS: &str = "drone";

/// Everything needed to regenerate one sample, recorded in the manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleProvenance {
    pub index: u32,
    pub file_name: String,
    pub sprite: PathBuf,
    pub background: PathBuf,
    pub placement: Placement,
    /// Placement attempts consumed, including rejected draws.
    pub attempts: u32,
    /// Annotation corners `[x_min, y_min, x_max, y_max]` in pixels.
    pub annotation: [f64; 4],
}

/// The clamp applied to drawn object sizes, recorded for transparency since
/// it reshapes the tails of the configured distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizeClamp {
    pub min_px: f64,
    pub max_background_fraction: f64,
}

/// Written next to the images: the exact recipe for the dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub config: SynthConfig,
    pub size_clamp: SizeClamp,
    pub samples: Vec<SampleProvenance>,
}

/// What `generate_dataset` reports back.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetSummary {
    pub samples_written: u32,
    /// Placement draws that were rejected and redrawn across all samples.
    pub rejected_placements: u32,
    pub output_dir: PathBuf,
}

fn read_rgba(path: &Path) -> Result<RgbaImage, SynthError> {
    image::open(path)
        .map(|img| img.to_rgba8())
        .map_err(|source| SynthError::ImageRead {
            path: path.to_path_buf(),
            source,
        })
}

fn read_rgb(path: &Path) -> Result<RgbImage, SynthError> {
    image::open(path)
        .map(|img| img.to_rgb8())
        .map_err(|source| SynthError::ImageRead {
            path: path.to_path_buf(),
            source,
        })
}

/// RNG for one lane of one sample. Lane 0 drives placement (asset choice
/// and transform), lane 1 drives grain. Separate streams mean toggling a
/// feature or parallelizing over samples cannot shift any other draw.
fn lane_rng(seed: u64, sample_index: u32, lane: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(u64::from(sample_index) * 2 + lane);
    rng
}

/// The RNG that drew a given sample's asset choice and placement. Public
/// so a sample can be regenerated from its manifest entry alone.
pub fn placement_rng(seed: u64, sample_index: u32) -> ChaCha8Rng {
    lane_rng(seed, sample_index, 0)
}

/// The RNG that drew a given sample's film grain.
pub fn grain_rng(seed: u64, sample_index: u32) -> ChaCha8Rng {
    lane_rng(seed, sample_index, 1)
}

/// Generates `config.num_samples` composited samples under `output_dir`:
/// `images/{index:05}.png`, an `annotations.json` ground-truth file, and a
/// `manifest.json` recording the config and per-sample provenance.
///
/// Per sample, the effect order is: background blur (pre-composite), sprite
/// composite, global blur, grain, brightness. Each feature toggle skips its
/// stage; brightness belongs to the base lighting randomization and always
/// applies.
pub fn generate_dataset(
    config: &SynthConfig,
    output_dir: &Path,
) -> Result<DatasetSummary, SynthError> {
    config.validate()?;
    let images_dir = output_dir.join("images");
    fs::create_dir_all(&images_dir).map_err(|source| SynthError::Io {
        path: images_dir.clone(),
        source,
    })?;

    let sprites: Vec<RgbaImage> = config
        .sprite_paths
        .iter()
        .map(|p| read_rgba(p))
        .collect::<Result<_, _>>()?;
    let backgrounds: Vec<RgbImage> = config
        .background_paths
        .iter()
        .map(|p| read_rgb(p))
        .collect::<Result<_, _>>()?;

    // The background pass is a pure function of the asset, so blur each
    // one once rather than per sample.
    let toggles = config.feature_toggles;
    let prepared: Vec<RgbImage> = if toggles.blur && config.blur_sigma_background > 0.0 {
        backgrounds
            .iter()
            .map(|bg| apply_blur(bg, config.blur_sigma_background))
            .collect()
    } else {
        backgrounds.clone()
    };

    let mut ground_truth = Vec::with_capacity(config.num_samples as usize);
    let mut provenance = Vec::with_capacity(config.num_samples as usize);
    let mut rejected_total = 0u32;

    for index in 0..config.num_samples {
        let mut rng = placement_rng(config.rng_seed, index);
        let mut chosen = None;
        let mut attempts = 0u32;
        while attempts < MAX_PLACEMENT_ATTEMPTS {
            attempts += 1;
            let bg_index = rng.random_range(0..prepared.len());
            let sprite_index = rng.random_range(0..sprites.len());
            let sprite = &sprites[sprite_index];
            let bg = &prepared[bg_index];
            let placement = match sample_placement(
                config,
                sprite.width(),
                sprite.height(),
                bg.width(),
                bg.height(),
                &mut rng,
            ) {
                Ok(p) => p,
                Err(SynthError::BackgroundTooSmall { .. } | SynthError::DoesNotFit { .. }) => {
                    rejected_total += 1;
                    continue;
                }
                Err(other) => return Err(other),
            };
            let out = composite(bg, sprite, &placement);
            let Some(annotation) = out.annotation else {
                // Nothing visible landed (e.g. a transparent sprite):
                // reject like a failed placement and redraw.
                rejected_total += 1;
                continue;
            };
            chosen = Some((bg_index, sprite_index, placement, out.image, annotation));
            break;
        }
        let Some((bg_index, sprite_index, placement, mut image, annotation)) = chosen else {
            return Err(SynthError::PlacementExhausted {
                sample_index: index,
                attempts: MAX_PLACEMENT_ATTEMPTS,
            });
        };

        if toggles.blur && config.blur_sigma_global > 0.0 {
            image = apply_blur(&image, config.blur_sigma_global);
        }
        if toggles.noise && config.grain_strength > 0.0 {
            let mut grain = grain_rng(config.rng_seed, index);
            image = apply_grain(&image, config.grain_strength, &mut grain);
        }
        image = apply_brightness(&image, placement.brightness);

        let file_name = format!("images/{index:05}.png");
        let path = output_dir.join(&file_name);
        image.save(&path).map_err(|source| SynthError::ImageWrite {
            path: path.clone(),
            source,
        })?;

        let size = FrameSize::new(image.width(), image.height())
            .expect("loaded images are non-empty");
        ground_truth.push(GroundTruthImage {
            file_name: file_name.clone(),
            size,
            boxes: vec![annotation],
        });
        provenance.push(SampleProvenance {
            index,
            file_name,
            sprite: config.sprite_paths[sprite_index].clone(),
            background: config.background_paths[bg_index].clone(),
            placement,
            attempts,
            annotation: annotation.to_corners(),
        });
    }

    write_coco_groundtruth(&output_dir.join("annotations.json"), &ground_truth, SYNTH_CLASS)?;

    let manifest = DatasetManifest {
        config: config.clone(),
        size_clamp: SizeClamp {
            min_px: MIN_SPRITE_SIDE_PX,
            max_background_fraction: MAX_SPRITE_FRAC,
        },
        samples: provenance,
    };
    let manifest_path = output_dir.join("manifest.json");
    let mut text = serde_json::to_string_pretty(&manifest)?;
    text.push('\n');
    fs::write(&manifest_path, text).map_err(|source| SynthError::Io {
        path: manifest_path,
        source,
    })?;

    Ok(DatasetSummary {
        samples_written: config.num_samples,
        rejected_placements: rejected_total,
        output_dir: output_dir.to_path_buf(),
    })
}

/// Reads a manifest back, for regeneration or provenance checks.
pub fn read_manifest(path: &Path) -> Result<DatasetManifest, SynthError> {
    let text = fs::read_to_string(path).map_err(|source| SynthError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(serde_json::from_str(&text)?)
}

//! Per-sample transform sampling: object size, rotation, lighting, and a
//! position that keeps the transformed sprite fully inside the frame.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::config::{SynthConfig, MAX_SPRITE_FRAC, MIN_SPRITE_SIDE_PX};
use crate::SynthError;

/// A fully determined sprite transform. `translate_*` is the top-left of
/// the transformed sprite's bounding rectangle in background pixels; scale
/// maps sprite texels to background pixels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Placement {
    pub scale: f64,
    pub rotation_deg: f64,
    /// Multiplicative lighting factor applied to the finished frame.
    pub brightness: f64,
    pub translate_x: f64,
    pub translate_y: f64,
}

impl Placement {
    /// Size of the axis-aligned bounding rectangle of a `sprite_w` ×
    /// `sprite_h` sprite under this placement's scale and rotation.
    pub fn bounds(&self, sprite_w: u32, sprite_h: u32) -> (f64, f64) {
        let (sin, cos) = self.rotation_deg.to_radians().sin_cos();
        let w = sprite_w as f64 * self.scale;
        let h = sprite_h as f64 * self.scale;
        (
            w * cos.abs() + h * sin.abs(),
            w * sin.abs() + h * cos.abs(),
        )
    }

    /// How far linear resampling can push visible coverage beyond the
    /// geometric bounds: half a source texel, in background pixels.
    pub fn support_margin(&self) -> f64 {
        0.5 * self.scale
    }
}

/// Draws one placement. The draw order is fixed — size, rotation,
/// brightness, translation — and every draw is consumed even when a toggle
/// pins its value, so switching features on or off never shifts the stream
/// for later draws.
///
/// Makes a single attempt: if the drawn size cannot fit inside the
/// background (after rotation and the resampling margin), the caller gets
/// an error and decides whether to redraw.
pub fn sample_placement<R: Rng + ?Sized>(
    config: &SynthConfig,
    sprite_w: u32,
    sprite_h: u32,
    bg_w: u32,
    bg_h: u32,
    rng: &mut R,
) -> Result<Placement, SynthError> {
    let z: f64 = rng.sample(StandardNormal);
    let rotation_deg = rng.random_range(-config.rotation_range_deg..=config.rotation_range_deg);
    let brightness = rng.random_range(config.brightness_jitter[0]..=config.brightness_jitter[1]);

    let max_side = MAX_SPRITE_FRAC * f64::from(bg_w.min(bg_h));
    if max_side < MIN_SPRITE_SIDE_PX {
        return Err(SynthError::BackgroundTooSmall {
            width: bg_w,
            height: bg_h,
        });
    }
    let drawn = if config.feature_toggles.size_distribution {
        config.size_mean_px + config.size_std_px * z
    } else {
        config.size_mean_px
    };
    let longest_side = drawn.clamp(MIN_SPRITE_SIDE_PX, max_side);
    let scale = longest_side / f64::from(sprite_w.max(sprite_h));

    let probe = Placement {
        scale,
        rotation_deg,
        brightness,
        translate_x: 0.0,
        translate_y: 0.0,
    };
    let (bw, bh) = probe.bounds(sprite_w, sprite_h);
    let margin = probe.support_margin();
    let max_x = f64::from(bg_w) - bw - margin;
    let max_y = f64::from(bg_h) - bh - margin;
    if max_x < margin || max_y < margin {
        return Err(SynthError::DoesNotFit {
            needed_w: bw + 2.0 * margin,
            needed_h: bh + 2.0 * margin,
            bg_w,
            bg_h,
        });
    }
    let translate_x = rng.random_range(margin..=max_x);
    let translate_y = rng.random_range(margin..=max_y);
    Ok(Placement {
        translate_x,
        translate_y,
        ..probe
    })
}

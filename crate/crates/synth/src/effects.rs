//! Post-processing passes: Gaussian blur, film grain, and brightness.
//! Each pass maps an 8-bit frame to an 8-bit frame; a zero parameter is an
//! exact identity.

use image::RgbImage;
use rand::Rng;
use rand_distr::StandardNormal;

/// Normalized 1-D Gaussian taps for radius `ceil(3 sigma)`.
fn gaussian_kernel(sigma: f64) -> Vec<f64> {
    let radius = (3.0 * sigma).ceil() as i64;
    let mut weights: Vec<f64> = (-radius..=radius)
        .map(|k| (-((k * k) as f64) / (2.0 * sigma * sigma)).exp())
        .collect();
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    weights
}

/// Separable Gaussian blur with clamp-to-edge boundaries. `sigma <= 0`
/// returns the image unchanged.
pub fn apply_blur(image: &RgbImage, sigma: f64) -> RgbImage {
    if sigma <= 0.0 {
        return image.clone();
    }
    let (w, h) = image.dimensions();
    let weights = gaussian_kernel(sigma);
    let radius = (weights.len() / 2) as i64;
    let src = image.as_raw();
    let stride = w as usize * 3;

    // Horizontal pass into a float buffer, then vertical back to bytes.
    let mut horizontal = vec![0.0f64; src.len()];
    for y in 0..h as usize {
        let row = &src[y * stride..(y + 1) * stride];
        let out_row = &mut horizontal[y * stride..(y + 1) * stride];
        for x in 0..w as usize {
            let mut acc = [0.0f64; 3];
            for (i, wt) in weights.iter().enumerate() {
                let sx = (x as i64 + i as i64 - radius).clamp(0, w as i64 - 1) as usize;
                for c in 0..3 {
                    acc[c] += wt * f64::from(row[sx * 3 + c]);
                }
            }
            out_row[x * 3..x * 3 + 3].copy_from_slice(&acc);
        }
    }

    let mut out = RgbImage::new(w, h);
    let dst: &mut [u8] = &mut out;
    for y in 0..h as usize {
        for x in 0..w as usize {
            let mut acc = [0.0f64; 3];
            for (i, wt) in weights.iter().enumerate() {
                let sy = (y as i64 + i as i64 - radius).clamp(0, h as i64 - 1) as usize;
                for c in 0..3 {
                    acc[c] += wt * horizontal[sy * stride + x * 3 + c];
                }
            }
            for c in 0..3 {
                dst[y * stride + x * 3 + c] = acc[c].round().clamp(0.0, 255.0) as u8;
            }
        }
    }
    out
}

/// Adds zero-mean Gaussian film grain with standard deviation `strength`
/// (in [0,1] intensity units). One draw per pixel in row-major order,
/// applied to all three channels, so the grain is achromatic and the noise
/// field is a pure function of the RNG state. `strength <= 0` returns the
/// image unchanged.
pub fn apply_grain<R: Rng + ?Sized>(image: &RgbImage, strength: f64, rng: &mut R) -> RgbImage {
    if strength <= 0.0 {
        return image.clone();
    }
    let mut out = image.clone();
    for pixel in out.pixels_mut() {
        let z: f64 = rng.sample(StandardNormal);
        let noise = z * strength * 255.0;
        for c in 0..3 {
            pixel.0[c] = (f64::from(pixel.0[c]) + noise).round().clamp(0.0, 255.0) as u8;
        }
    }
    out
}

/// Scales every channel by `factor`, clamping to the valid range. A factor
/// of exactly 1 is an identity.
pub fn apply_brightness(image: &RgbImage, factor: f64) -> RgbImage {
    let mut out = image.clone();
    for value in out.iter_mut() {
        *value = (f64::from(*value) * factor).round().clamp(0.0, 255.0) as u8;
    }
    out
}

//! Sprite-over-background compositing with the annotation derived from the
//! pixels the sprite actually covers.

use image::{RgbImage, RgbaImage};
use trackboost_core::geometry::BoundingBox;

use crate::placement::Placement;

/// Minimum blended alpha for a pixel to count as object coverage: anything
/// that would round to a nonzero 8-bit alpha. Zero-alpha regions stay at
/// exactly zero through the interpolation, so this only filters
/// sub-quantum dust at resampled edges.
pub const ALPHA_SUPPORT_THRESHOLD: f64 = 0.5 / 255.0;

/// A composited frame plus the tight bounds of the visible sprite pixels.
/// `annotation` is `None` when no pixel cleared the visibility threshold
/// (e.g. a fully transparent sprite), in which case `image` equals the
/// background byte for byte.
pub struct Composite {
    pub image: RgbImage,
    pub annotation: Option<BoundingBox>,
}

/// Sprite texel as premultiplied RGB plus alpha, all in [0,1]. Out-of-bounds
/// reads are fully transparent.
fn texel(sprite: &RgbaImage, x: i64, y: i64) -> [f64; 4] {
    if x < 0 || y < 0 || x >= i64::from(sprite.width()) || y >= i64::from(sprite.height()) {
        return [0.0; 4];
    }
    let [r, g, b, a] = sprite.get_pixel(x as u32, y as u32).0;
    let alpha = f64::from(a) / 255.0;
    [
        f64::from(r) / 255.0 * alpha,
        f64::from(g) / 255.0 * alpha,
        f64::from(b) / 255.0 * alpha,
        alpha,
    ]
}

/// Alpha-blends `sprite` over `background` under `placement`, inverse-mapping
/// each background pixel into sprite space and sampling bilinearly in
/// premultiplied alpha (which keeps transparent texels from bleeding dark
/// fringes into the edge).
///
/// The annotation is the tight axis-aligned box around the supported pixels:
/// `[min_x, min_y, max_x + 1, max_y + 1]` in pixel-index terms, so its width
/// counts covered columns.
pub fn composite(background: &RgbImage, sprite: &RgbaImage, placement: &Placement) -> Composite {
    let (bg_w, bg_h) = background.dimensions();
    let (sp_w, sp_h) = sprite.dimensions();
    let mut image = background.clone();

    let (bw, bh) = placement.bounds(sp_w, sp_h);
    let margin = placement.support_margin();
    let center_x = placement.translate_x + bw / 2.0;
    let center_y = placement.translate_y + bh / 2.0;
    let sprite_cx = f64::from(sp_w) / 2.0;
    let sprite_cy = f64::from(sp_h) / 2.0;
    let (sin, cos) = placement.rotation_deg.to_radians().sin_cos();
    let inv_scale = 1.0 / placement.scale;

    let x_lo = ((placement.translate_x - margin).floor() as i64).max(0);
    let x_hi = ((placement.translate_x + bw + margin).ceil() as i64).min(i64::from(bg_w));
    let y_lo = ((placement.translate_y - margin).floor() as i64).max(0);
    let y_hi = ((placement.translate_y + bh + margin).ceil() as i64).min(i64::from(bg_h));

    let mut support: Option<(u32, u32, u32, u32)> = None;
    for py in y_lo..y_hi {
        for px in x_lo..x_hi {
            // Background pixel center, rotated back and unscaled into
            // continuous sprite coordinates.
            let dx = px as f64 + 0.5 - center_x;
            let dy = py as f64 + 0.5 - center_y;
            let qx = (cos * dx + sin * dy) * inv_scale + sprite_cx;
            let qy = (-sin * dx + cos * dy) * inv_scale + sprite_cy;

            // Bilinear gather over the four nearest texel centers.
            let u = qx - 0.5;
            let v = qy - 0.5;
            let i0 = u.floor();
            let j0 = v.floor();
            let fu = u - i0;
            let fv = v - j0;
            let (i0, j0) = (i0 as i64, j0 as i64);
            let t00 = texel(sprite, i0, j0);
            let t10 = texel(sprite, i0 + 1, j0);
            let t01 = texel(sprite, i0, j0 + 1);
            let t11 = texel(sprite, i0 + 1, j0 + 1);
            let mut acc = [0.0f64; 4];
            for c in 0..4 {
                acc[c] = t00[c] * (1.0 - fu) * (1.0 - fv)
                    + t10[c] * fu * (1.0 - fv)
                    + t01[c] * (1.0 - fu) * fv
                    + t11[c] * fu * fv;
            }
            let alpha = acc[3];
            if alpha <= 0.0 {
                continue; // untouched: the background byte stays exact
            }

            let (px_u, py_u) = (px as u32, py as u32);
            let bg_px = image.get_pixel(px_u, py_u).0;
            let mut out = [0u8; 3];
            for c in 0..3 {
                let blended = acc[c] + (1.0 - alpha) * (f64::from(bg_px[c]) / 255.0);
                out[c] = (blended * 255.0).round().clamp(0.0, 255.0) as u8;
            }
            image.put_pixel(px_u, py_u, image::Rgb(out));

            if alpha >= ALPHA_SUPPORT_THRESHOLD {
                support = Some(match support {
                    None => (px_u, py_u, px_u, py_u),
                    Some((x0, y0, x1, y1)) => {
                        (x0.min(px_u), y0.min(py_u), x1.max(px_u), y1.max(py_u))
                    }
                });
            }
        }
    }

    let annotation = support.map(|(x0, y0, x1, y1)| {
        BoundingBox::new(
            f64::from(x0),
            f64::from(y0),
            f64::from(x1 + 1),
            f64::from(y1 + 1),
        )
        .expect("support bounds are ordered by construction")
    });
    Composite { image, annotation }
}

//! Axis-aligned boxes, frame dimensions, IoU, and area-based size binning.

use std::fmt;

use thiserror::Error;

/// Errors from constructing geometric primitives.
#[derive(Debug, Error)]
pub enum GeometryError {
    /// Box has zero or negative extent along at least one axis.
    #[error("degenerate bounding box: x [{x_min}, {x_max}], y [{y_min}, {y_max}]")]
    DegenerateBox {
        x_min: f64,
        y_min: f64,
        x_max: f64,
        y_max: f64,
    },
    /// Box coordinates contain NaN or infinity.
    #[error("bounding box coordinates must be finite")]
    NonFiniteBox,
    /// Frame dimensions include a zero.
    #[error("frame size must be at least 1x1, got {width}x{height}")]
    EmptyFrame { width: u32, height: u32 },
}

/// Axis-aligned bounding box in pixel coordinates.
///
/// Stored as top-left corner plus extent — the same `[x, y, w, h]`
/// parametrization annotation files use — so a box parsed from a file and
/// written back reproduces the original float values bit for bit. Corner
/// coordinates are derived views (`x_max = x + w`), which may round; code
/// that needs exchange-exact values should stick to `to_xywh`.
///
/// Invariants (enforced at construction): all four values finite, width and
/// height strictly positive, and the derived corners finite as well.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundingBox {
    x: f64,
    y: f64,
    width: f64,
    height: f64,
}

impl BoundingBox {
    /// Builds a box from its corners, rejecting non-finite or degenerate input.
    pub fn new(x_min: f64, y_min: f64, x_max: f64, y_max: f64) -> Result<Self, GeometryError> {
        if ![x_min, y_min, x_max, y_max].iter().all(|v| v.is_finite()) {
            return Err(GeometryError::NonFiniteBox);
        }
        if x_min >= x_max || y_min >= y_max {
            return Err(GeometryError::DegenerateBox {
                x_min,
                y_min,
                x_max,
                y_max,
            });
        }
        Ok(Self {
            x: x_min,
            y: y_min,
            width: x_max - x_min,
            height: y_max - y_min,
        })
    }

    /// Builds a box from top-left corner plus extent (COCO bbox layout).
    ///
    /// The four values are stored verbatim, so `to_xywh` returns them
    /// bit-identically.
    pub fn from_xywh(x: f64, y: f64, w: f64, h: f64) -> Result<Self, GeometryError> {
        if ![x, y, w, h].iter().all(|v| v.is_finite()) || !(x + w).is_finite() || !(y + h).is_finite()
        {
            return Err(GeometryError::NonFiniteBox);
        }
        if w <= 0.0 || h <= 0.0 {
            return Err(GeometryError::DegenerateBox {
                x_min: x,
                y_min: y,
                x_max: x + w,
                y_max: y + h,
            });
        }
        Ok(Self {
            x,
            y,
            width: w,
            height: h,
        })
    }

    pub fn x_min(&self) -> f64 {
        self.x
    }

    pub fn y_min(&self) -> f64 {
        self.y
    }

    pub fn x_max(&self) -> f64 {
        self.x + self.width
    }

    pub fn y_max(&self) -> f64 {
        self.y + self.height
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn height(&self) -> f64 {
        self.height
    }

    pub fn area(&self) -> f64 {
        self.width * self.height
    }

    /// Center point `(cx, cy)`.
    pub fn center(&self) -> (f64, f64) {
        (self.x + self.width / 2.0, self.y + self.height / 2.0)
    }

    /// `[x, y, w, h]` (COCO bbox layout). Exactly the values the box was
    /// built from when it came through `from_xywh`.
    pub fn to_xywh(&self) -> [f64; 4] {
        [self.x, self.y, self.width, self.height]
    }

    /// `[x_min, y_min, x_max, y_max]`.
    pub fn to_corners(&self) -> [f64; 4] {
        [self.x, self.y, self.x_max(), self.y_max()]
    }

    /// Clamps the box to `[0, width] x [0, height]`.
    ///
    /// Returns the clamped box and whether any coordinate actually moved.
    /// A box that ends up with zero extent (it lay entirely outside the
    /// frame) is reported as degenerate.
    pub fn clamp_to(&self, frame: FrameSize) -> Result<(Self, bool), GeometryError> {
        let w = f64::from(frame.width());
        let h = f64::from(frame.height());
        let corners = (self.x_min(), self.y_min(), self.x_max(), self.y_max());
        let clamped = (
            corners.0.clamp(0.0, w),
            corners.1.clamp(0.0, h),
            corners.2.clamp(0.0, w),
            corners.3.clamp(0.0, h),
        );
        if clamped == corners {
            return Ok((*self, false));
        }
        let boxed = Self::new(clamped.0, clamped.1, clamped.2, clamped.3)?;
        Ok((boxed, true))
    }

    /// True when the box lies entirely inside `[0, width] x [0, height]`.
    pub fn fits_in(&self, frame: FrameSize) -> bool {
        self.x >= 0.0
            && self.y >= 0.0
            && self.x_max() <= f64::from(frame.width())
            && self.y_max() <= f64::from(frame.height())
    }
}

impl fmt::Display for BoundingBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}, {}, {}, {}]",
            self.x,
            self.y,
            self.x_max(),
            self.y_max()
        )
    }
}

/// Frame (image) dimensions in pixels. Both sides are at least 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrameSize {
    width: u32,
    height: u32,
}

impl FrameSize {
    pub fn new(width: u32, height: u32) -> Result<Self, GeometryError> {
        if width == 0 || height == 0 {
            return Err(GeometryError::EmptyFrame { width, height });
        }
        Ok(Self { width, height })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    /// Length of the frame diagonal in pixels.
    pub fn diagonal(&self) -> f64 {
        f64::from(self.width).hypot(f64::from(self.height))
    }
}

impl fmt::Display for FrameSize {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.width, self.height)
    }
}

/// COCO-style object size bins, split on box area.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SizeCategory {
    /// `area < 32^2`
    Small,
    /// `32^2 <= area < 96^2`
    Medium,
    /// `area >= 96^2`
    Large,
}

/// Upper area bound (exclusive) of the small bin: `32^2`.
pub const SMALL_AREA_MAX: f64 = 1024.0;
/// Upper area bound (exclusive) of the medium bin: `96^2`.
pub const MEDIUM_AREA_MAX: f64 = 9216.0;

/// Bins a box by area. Boundary areas fall into the upper bin: an area of
/// exactly `32^2` is medium, exactly `96^2` is large.
pub fn area_category(b: &BoundingBox) -> SizeCategory {
    let area = b.area();
    if area < SMALL_AREA_MAX {
        SizeCategory::Small
    } else if area < MEDIUM_AREA_MAX {
        SizeCategory::Medium
    } else {
        SizeCategory::Large
    }
}

/// Intersection-over-union of two boxes. Returns a value in `[0, 1]`;
/// boxes that merely touch along an edge have IoU 0.
pub fn iou(a: &BoundingBox, b: &BoundingBox) -> f64 {
    let ix = (a.x_max().min(b.x_max()) - a.x_min().max(b.x_min())).max(0.0);
    let iy = (a.y_max().min(b.y_max()) - a.y_min().max(b.y_min())).max(0.0);
    let inter = ix * iy;
    if inter <= 0.0 {
        return 0.0;
    }
    let union = a.area() + b.area() - inter;
    inter / union
}

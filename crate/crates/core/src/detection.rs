//! Detections and per-video detection sequences — the input side of the
//! tracking pipeline.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::geometry::{BoundingBox, FrameSize, GeometryError};

/// Class label used when the source format carries no category information.
pub const DEFAULT_CLASS: &str = "drone";

/// Errors from constructing detections or sequences.
#[derive(Debug, Error)]
pub enum DetectionError {
    #[error("confidence must lie in [0, 1], got {0}")]
    ConfidenceOutOfRange(f64),
    #[error("frame {frame_index}: detection bbox {bbox} lies outside frame {frame}")]
    BoxOutsideFrame {
        frame_index: u64,
        bbox: BoundingBox,
        frame: FrameSize,
    },
    #[error(
        "frame indices must be strictly increasing, got {current} after {previous}"
    )]
    NonMonotonicFrames { previous: u64, current: u64 },
    #[error("frame {expected}: detection carries mismatched frame index {actual}")]
    FrameIndexMismatch { expected: u64, actual: u64 },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// A single detector output: box, score, and class on one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct Detection {
    pub frame_index: u64,
    pub bbox: BoundingBox,
    pub confidence: f64,
    pub class_label: String,
}

impl Detection {
    /// Builds a detection, rejecting confidences outside `[0, 1]`.
    pub fn new(
        frame_index: u64,
        bbox: BoundingBox,
        confidence: f64,
        class_label: impl Into<String>,
    ) -> Result<Self, DetectionError> {
        if !(0.0..=1.0).contains(&confidence) {
            return Err(DetectionError::ConfidenceOutOfRange(confidence));
        }
        Ok(Self {
            frame_index,
            bbox,
            confidence,
            class_label: class_label.into(),
        })
    }
}

/// Identifies a frame across videos. Orders by `(video_id, frame_index)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct FrameKey {
    pub video_id: String,
    pub frame_index: u64,
}

impl FrameKey {
    pub fn new(video_id: impl Into<String>, frame_index: u64) -> Self {
        Self {
            video_id: video_id.into(),
            frame_index,
        }
    }
}

impl fmt::Display for FrameKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.video_id.is_empty() {
            write!(f, "frame {}", self.frame_index)
        } else {
            write!(f, "{}:{}", self.video_id, self.frame_index)
        }
    }
}

/// One frame's worth of detections inside a sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct SequenceFrame {
    pub frame_index: u64,
    pub detections: Vec<Detection>,
}

/// An ordered run of frames from one video, with the frame geometry that
/// tracking distance gates are computed against.
///
/// Invariants (enforced at construction): frame indices strictly increase,
/// every detection's `frame_index` matches its frame entry, and every bbox
/// lies inside the frame. A frame with no detections is representable and
/// distinct from an absent frame.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectionSequence {
    frame_size: FrameSize,
    frames: Vec<SequenceFrame>,
}

impl DetectionSequence {
    pub fn new(
        frame_size: FrameSize,
        frames: Vec<SequenceFrame>,
    ) -> Result<Self, DetectionError> {
        let mut previous: Option<u64> = None;
        for frame in &frames {
            if let Some(prev) = previous {
                if frame.frame_index <= prev {
                    return Err(DetectionError::NonMonotonicFrames {
                        previous: prev,
                        current: frame.frame_index,
                    });
                }
            }
            previous = Some(frame.frame_index);
            for det in &frame.detections {
                if det.frame_index != frame.frame_index {
                    return Err(DetectionError::FrameIndexMismatch {
                        expected: frame.frame_index,
                        actual: det.frame_index,
                    });
                }
                if !det.bbox.fits_in(frame_size) {
                    return Err(DetectionError::BoxOutsideFrame {
                        frame_index: frame.frame_index,
                        bbox: det.bbox,
                        frame: frame_size,
                    });
                }
            }
        }
        Ok(Self { frame_size, frames })
    }

    pub fn frame_size(&self) -> FrameSize {
        self.frame_size
    }

    pub fn frames(&self) -> &[SequenceFrame] {
        &self.frames
    }

    pub fn num_frames(&self) -> usize {
        self.frames.len()
    }

    pub fn num_detections(&self) -> usize {
        self.frames.iter().map(|f| f.detections.len()).sum()
    }
}

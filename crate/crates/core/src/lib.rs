//! Post-processing toolkit for single-class video object detection.
//!
//! The pipeline turns per-frame detector output into temporally consistent,
//! rescored detections and measures the effect:
//!
//! 1. **[`tracker`]** — constant-velocity Kalman tracking-by-detection with
//!    greedy center-distance association and a hit-counter lifecycle. Output
//!    boxes are always raw detector boxes; tracks only attribute them.
//! 2. **[`boost`]** — track-based confidence boosting: every observation's
//!    score is averaged with its track's (whole-track or running) maximum.
//! 3. **[`eval`]** — average precision at a fixed IoU threshold with
//!    COCO-style size-bin breakdowns.
//! 4. **[`formats`]** — COCO annotation/result JSON and MOT CSV readers and
//!    writers, the tracked intermediate format, and uniform frame sampling.
//!
//! [`geometry`] and [`detection`] supply the shared vocabulary (boxes,
//! frames, sequences); everything downstream validates its inputs at the
//! boundary and is deterministic for identical inputs and configuration.

pub mod boost;
pub mod detection;
pub mod eval;
pub mod formats;
pub mod geometry;
pub mod tracker;

pub use boost::{boost_sequence, boost_track, BoostMode, BoostedDetection};
pub use detection::{Detection, DetectionSequence, FrameKey, SequenceFrame};
pub use eval::{evaluate, EvalDetection, EvalReport, Evaluation, GroundTruthSet};
pub use geometry::{area_category, iou, BoundingBox, FrameSize, SizeCategory};
pub use tracker::{run_sequence, Tracker, TrackerConfig, TrackId, TrackedDetection};

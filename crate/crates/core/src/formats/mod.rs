//! Dataset file formats and sampling.
//!
//! Readers are strict about structure (a malformed record is a hard error
//! naming the record) but tolerant about sloppy geometry: boxes overhanging
//! the frame are clamped, degenerate boxes are dropped — every such repair
//! is counted in [`IoDiagnostics`] so nothing disappears silently.

pub mod coco;
pub mod mot;
pub mod sampling;
pub mod tracked;

use std::path::PathBuf;

use thiserror::Error;

pub use coco::{
    frame_key_from_file_name, read_coco_detections, read_coco_groundtruth, read_frame_map,
    write_boosted_results, write_coco_groundtruth, BoostedRecord, CocoDetections,
    CocoGroundTruth, CocoImage, CocoIndex, FrameMap, GroundTruthImage,
};
pub use mot::{read_mot_detections, write_mot_detections};
pub use sampling::{uniform_sample, uniform_sample_indices, SampleError};
pub use tracked::{
    read_tracked, write_tracked, TrackScores, TrackedFile, TrackedRecord, TrackedVideo,
};

/// Counters and messages for input repairs and rejections.
#[derive(Debug, Clone, Default)]
pub struct IoDiagnostics {
    /// Boxes clamped to the frame bounds.
    pub clamped_boxes: u64,
    /// Scores clamped into `[0, 1]`.
    pub clamped_scores: u64,
    /// Human-readable reasons for dropped records.
    pub rejected: Vec<String>,
}

impl IoDiagnostics {
    pub fn is_clean(&self) -> bool {
        self.clamped_boxes == 0 && self.clamped_scores == 0 && self.rejected.is_empty()
    }

    pub fn merge(&mut self, other: IoDiagnostics) {
        self.clamped_boxes += other.clamped_boxes;
        self.clamped_scores += other.clamped_scores;
        self.rejected.extend(other.rejected);
    }

    /// One-line summary, or `None` when there is nothing to report.
    pub fn summary(&self) -> Option<String> {
        if self.is_clean() {
            return None;
        }
        Some(format!(
            "{} box(es) clamped, {} score(s) clamped, {} record(s) rejected",
            self.clamped_boxes,
            self.clamped_scores,
            self.rejected.len()
        ))
    }
}

/// Errors from reading or writing dataset files.
#[derive(Debug, Error)]
pub enum FormatError {
    // The causes live in `source()` only, so cause-chain printers render
    // them exactly once.
    #[error("cannot access {path}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path} is not valid JSON")]
    Json {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error("{path}: {section}[{index}] is malformed: {message}")]
    Record {
        path: PathBuf,
        section: &'static str,
        index: usize,
        message: String,
    },
    #[error("{path}: record {record} references unknown image id {image_id}")]
    UnknownImageId {
        path: PathBuf,
        record: usize,
        image_id: i64,
    },
    #[error("duplicate image id {0}")]
    DuplicateImageId(i64),
    #[error("two images map to video {video_id:?} frame {frame_index}")]
    DuplicateFrame { video_id: String, frame_index: u64 },
    #[error(
        "image {image_id}: cannot derive a video/frame from file name {file_name:?} \
         (expected a numeric stem like video/000123.jpg); supply a frame map"
    )]
    BadFileName { image_id: i64, file_name: String },
    #[error("video {0:?} mixes different frame sizes, so its detections cannot form one sequence")]
    InconsistentFrameSize(String),
    #[error("{path} line {line}: {message}")]
    MotLine {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("refusing to write inconsistent output: {0}")]
    InvariantViolation(String),
}

impl FormatError {
    pub(crate) fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        Self::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub(crate) fn json(path: &std::path::Path, source: serde_json::Error) -> Self {
        Self::Json {
            path: path.to_path_buf(),
            source,
        }
    }
}

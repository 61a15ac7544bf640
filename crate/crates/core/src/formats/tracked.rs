//! The intermediate file between `track` and `boost`: emitted detections
//! with their track attribution, plus each track's full score history.
//!
//! Boosting needs complete tracks (the whole-track maximum includes
//! observations recorded before confirmation), so the file carries the
//! per-track score vectors alongside the emitted records. Floats are
//! written in shortest round-trip form; reading the file back reproduces
//! the in-memory values bit for bit.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::FormatError;

/// Top-level tracked file: independent per-video results.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrackedFile {
    pub videos: Vec<TrackedVideo>,
}

/// One video's tracker output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrackedVideo {
    pub video_id: String,
    pub frame_width: u32,
    pub frame_height: u32,
    /// Emitted detections in frame order (ascending track id within a
    /// frame).
    pub records: Vec<TrackedRecord>,
    /// Score histories of every confirmed track, ascending by track id.
    pub tracks: Vec<TrackScores>,
}

/// One emitted detection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrackedRecord {
    /// Image id this frame had in the source annotation file (synthesized
    /// as `frame_index + 1` for sources without one).
    pub image_id: i64,
    pub frame_index: u64,
    /// `[x, y, w, h]` — exactly the parsed detection box, unchanged.
    pub bbox: [f64; 4],
    /// Detector confidence (pre-boost).
    pub score: f64,
    pub category_id: i64,
    pub track_id: u64,
    /// Index of this observation in its track's score history.
    pub position_in_track: usize,
}

/// One track's observation history, parallel arrays.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrackScores {
    pub track_id: u64,
    pub frame_indices: Vec<u64>,
    pub scores: Vec<f64>,
}

pub fn write_tracked(path: &Path, file: &TrackedFile) -> Result<(), FormatError> {
    let body = serde_json::to_string(file).expect("tracked files always serialize");
    fs::write(path, body).map_err(|e| FormatError::io(path, e))
}

/// Reads a tracked file and verifies its internal consistency: every record
/// resolves to a track and a valid position, score vectors are well-formed,
/// and each track's frames strictly increase.
pub fn read_tracked(path: &Path) -> Result<TrackedFile, FormatError> {
    let text = fs::read_to_string(path).map_err(|e| FormatError::io(path, e))?;
    let file: TrackedFile =
        serde_json::from_str(&text).map_err(|e| FormatError::json(path, e))?;

    let record_err = |index: usize, message: String| FormatError::Record {
        path: path.to_path_buf(),
        section: "videos",
        index,
        message,
    };

    let mut seen_videos = BTreeSet::new();
    for (video_index, video) in file.videos.iter().enumerate() {
        if !seen_videos.insert(&video.video_id) {
            return Err(record_err(
                video_index,
                format!("duplicate video id {:?}", video.video_id),
            ));
        }
        for track in &video.tracks {
            if track.scores.len() != track.frame_indices.len() {
                return Err(record_err(
                    video_index,
                    format!(
                        "track {}: {} scores but {} frame indices",
                        track.track_id,
                        track.scores.len(),
                        track.frame_indices.len()
                    ),
                ));
            }
            if track.scores.is_empty() {
                return Err(record_err(
                    video_index,
                    format!("track {} has no observations", track.track_id),
                ));
            }
            if !track.frame_indices.windows(2).all(|w| w[0] < w[1]) {
                return Err(record_err(
                    video_index,
                    format!("track {}: frame indices must strictly increase", track.track_id),
                ));
            }
            if let Some(bad) = track
                .scores
                .iter()
                .find(|s| !(s.is_finite() && (0.0..=1.0).contains(*s)))
            {
                return Err(record_err(
                    video_index,
                    format!("track {}: score {bad} outside [0, 1]", track.track_id),
                ));
            }
        }
        for (rec_index, record) in video.records.iter().enumerate() {
            let track = video
                .tracks
                .iter()
                .find(|t| t.track_id == record.track_id)
                .ok_or_else(|| {
                    record_err(
                        video_index,
                        format!(
                            "records[{rec_index}] references unknown track {}",
                            record.track_id
                        ),
                    )
                })?;
            if record.position_in_track >= track.scores.len() {
                return Err(record_err(
                    video_index,
                    format!(
                        "records[{rec_index}]: position {} out of range for track {} ({} observations)",
                        record.position_in_track,
                        record.track_id,
                        track.scores.len()
                    ),
                ));
            }
        }
    }
    Ok(file)
}

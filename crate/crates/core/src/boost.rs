//! Track-based confidence boosting.
//!
//! A detector often scores an object high on most frames of a track but
//! dips on a few hard ones (motion blur, partial occlusion). Boosting
//! shares evidence along the track: every observation's score is averaged
//! with the track's maximum score, lifting the dips without ever lowering
//! a score or exceeding the track maximum.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::detection::Detection;
use crate::tracker::{Track, TrackId, TrackedDetection};

/// Which maximum each observation is averaged with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoostMode {
    /// Whole-track maximum; requires the full track (post-processing).
    #[default]
    Offline,
    /// Running maximum over the observations seen so far; usable in a
    /// streaming setting.
    Causal,
}

/// Boosting errors: empty score vectors or tracked detections that don't
/// line up with the track table they reference.
#[derive(Debug, Error)]
pub enum BoostError {
    #[error("cannot boost an empty track")]
    EmptyTrack,
    #[error("tracked detection references unknown track {0}")]
    UnknownTrack(TrackId),
    #[error(
        "tracked detection references position {position} of track {track_id}, \
         which has only {len} observations"
    )]
    PositionOutOfRange {
        track_id: TrackId,
        position: usize,
        len: usize,
    },
}

/// A detection with its confidence rescored by its track's evidence.
#[derive(Debug, Clone, PartialEq)]
pub struct BoostedDetection {
    /// The underlying detection; its `confidence` field still holds the
    /// original detector score.
    pub detection: Detection,
    pub track_id: TrackId,
    pub original_confidence: f64,
    pub boosted_confidence: f64,
}

/// Boosts one track's score vector with the whole-track maximum:
/// `out[j] = (scores[j] + max(scores)) / 2`.
///
/// Scores never decrease, the track maximum is a fixed point, and values
/// stay inside `[0, 1]` for inputs inside `[0, 1]`.
pub fn boost_track(scores: &[f64]) -> Result<Vec<f64>, BoostError> {
    if scores.is_empty() {
        return Err(BoostError::EmptyTrack);
    }
    let track_max = scores.iter().copied().fold(f64::MIN, f64::max);
    Ok(scores.iter().map(|s| (s + track_max) / 2.0).collect())
}

/// Causal variant of [`boost_track`]: each score is averaged with the
/// running maximum of the observations up to and including itself.
pub fn boost_track_causal(scores: &[f64]) -> Result<Vec<f64>, BoostError> {
    if scores.is_empty() {
        return Err(BoostError::EmptyTrack);
    }
    let mut running_max = f64::MIN;
    Ok(scores
        .iter()
        .map(|s| {
            running_max = running_max.max(*s);
            (s + running_max) / 2.0
        })
        .collect())
}

/// Boosts a stream of tracked detections against their tracks' score
/// vectors (keyed by track id).
///
/// Output order mirrors the input. Per track, the boosted score is a pure
/// function of that track's own scores — other tracks never interfere.
pub fn boost_scores(
    tracked: &[TrackedDetection],
    track_scores: &BTreeMap<TrackId, Vec<f64>>,
    mode: BoostMode,
) -> Result<Vec<BoostedDetection>, BoostError> {
    let mut boosted_by_track: BTreeMap<TrackId, Vec<f64>> = BTreeMap::new();
    for (id, scores) in track_scores {
        let boosted = match mode {
            BoostMode::Offline => boost_track(scores)?,
            BoostMode::Causal => boost_track_causal(scores)?,
        };
        boosted_by_track.insert(*id, boosted);
    }

    tracked
        .iter()
        .map(|td| {
            let boosted = boosted_by_track
                .get(&td.track_id)
                .ok_or(BoostError::UnknownTrack(td.track_id))?;
            let score = *boosted.get(td.position_in_track).ok_or_else(|| {
                BoostError::PositionOutOfRange {
                    track_id: td.track_id,
                    position: td.position_in_track,
                    len: boosted.len(),
                }
            })?;
            Ok(BoostedDetection {
                detection: td.detection.clone(),
                track_id: td.track_id,
                original_confidence: td.detection.confidence,
                boosted_confidence: score,
            })
        })
        .collect()
}

/// Boosts tracker output directly: takes the emitted detections plus the
/// track table from the same run.
pub fn boost_sequence(
    tracked: &[TrackedDetection],
    tracks: &[Track],
    mode: BoostMode,
) -> Result<Vec<BoostedDetection>, BoostError> {
    let track_scores: BTreeMap<TrackId, Vec<f64>> = tracks
        .iter()
        .map(|t| (t.track_id, t.confidences()))
        .collect();
    boost_scores(tracked, &track_scores, mode)
}

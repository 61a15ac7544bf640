//! Greedy nearest-first assignment of detections to predicted track
//! positions, gated by a fraction of the frame diagonal.

use crate::detection::Detection;
use crate::geometry::FrameSize;

use super::{TrackId, TrackerConfig};

/// Outcome of one frame's assignment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssociationResult {
    /// `(track, detection index)` pairs, each side used at most once.
    pub matches: Vec<(TrackId, usize)>,
    /// Tracks left without a detection, in input order.
    pub unmatched_tracks: Vec<TrackId>,
    /// Detection indices left without a track, ascending.
    pub unmatched_detections: Vec<usize>,
}

/// Matches detections to tracks by center distance, nearest pair first.
///
/// `tracks` carries each live track's id and *predicted* center for this
/// frame. A pair is eligible when its Euclidean center distance is at most
/// `distance_threshold_frac * frame diagonal` (boundary inclusive). Eligible
/// pairs are consumed greedily in ascending distance order; ties break by
/// track id, then detection index, so the result is deterministic for any
/// input order.
pub fn associate(
    tracks: &[(TrackId, (f64, f64))],
    detections: &[Detection],
    frame_size: FrameSize,
    config: &TrackerConfig,
) -> AssociationResult {
    let threshold = config.distance_threshold_frac * frame_size.diagonal();

    let mut pairs: Vec<(f64, TrackId, usize, usize)> = Vec::new();
    for (track_pos, (track_id, center)) in tracks.iter().enumerate() {
        for (det_index, det) in detections.iter().enumerate() {
            let (dx, dy) = det.bbox.center();
            let dist = (dx - center.0).hypot(dy - center.1);
            if dist <= threshold {
                pairs.push((dist, *track_id, det_index, track_pos));
            }
        }
    }
    pairs.sort_by(|a, b| {
        a.0.total_cmp(&b.0)
            .then_with(|| a.1.cmp(&b.1))
            .then_with(|| a.2.cmp(&b.2))
    });

    let mut track_taken = vec![false; tracks.len()];
    let mut det_taken = vec![false; detections.len()];
    let mut matches = Vec::new();
    for (_, track_id, det_index, track_pos) in pairs {
        if track_taken[track_pos] || det_taken[det_index] {
            continue;
        }
        track_taken[track_pos] = true;
        det_taken[det_index] = true;
        matches.push((track_id, det_index));
    }

    let unmatched_tracks = tracks
        .iter()
        .zip(&track_taken)
        .filter(|(_, taken)| !**taken)
        .map(|((id, _), _)| *id)
        .collect();
    let unmatched_detections = (0..detections.len())
        .filter(|i| !det_taken[*i])
        .collect();

    AssociationResult {
        matches,
        unmatched_tracks,
        unmatched_detections,
    }
}

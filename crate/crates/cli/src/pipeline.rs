//! The track → boost machinery shared by `track`, `boost`, and `pipeline`.
//!
//! Videos are independent, so they are tracked in parallel; results are
//! assembled ascending by video id regardless of thread schedule. The
//! `pipeline` subcommand feeds `boost_records` the in-memory `TrackedFile`
//! that `track` would have written, and the intermediate file round-trips
//! floats bit-exactly, so running the two stages separately produces
//! byte-identical output.

use std::collections::BTreeMap;

use anyhow::anyhow;
use rayon::prelude::*;

use trackboost_core::boost::{boost_track, boost_track_causal, BoostMode};
use trackboost_core::detection::{DetectionSequence, FrameKey};
use trackboost_core::formats::{
    BoostedRecord, CocoIndex, TrackScores, TrackedFile, TrackedRecord, TrackedVideo,
};
use trackboost_core::tracker::{run_sequence, TrackerConfig};

use crate::error::{internal, CliError};

/// Tracks every video and assembles the intermediate file.
pub fn track_videos(
    sequences: &BTreeMap<String, DetectionSequence>,
    index: &CocoIndex,
    config: &TrackerConfig,
) -> Result<TrackedFile, CliError> {
    let entries: Vec<(&String, &DetectionSequence)> = sequences.iter().collect();
    let videos = entries
        .par_iter()
        .map(|(video_id, sequence)| track_one_video(video_id, sequence, index, config))
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(TrackedFile { videos })
}

fn track_one_video(
    video_id: &str,
    sequence: &DetectionSequence,
    index: &CocoIndex,
    config: &TrackerConfig,
) -> Result<TrackedVideo, CliError> {
    // The sequence and config were validated at the boundary, so failures
    // here (and any unindexed frame below — the reader materialized frames
    // *from* the index) are bugs, not bad input.
    let output = run_sequence(sequence, config).map_err(internal)?;

    let mut records = Vec::with_capacity(output.tracked.len());
    for td in &output.tracked {
        let frame = FrameKey::new(video_id, td.detection.frame_index);
        let image_id = index
            .image_id(&frame)
            .ok_or_else(|| internal(anyhow!("tracked frame {frame} is missing from the index")))?;
        records.push(TrackedRecord {
            image_id,
            frame_index: td.detection.frame_index,
            bbox: td.detection.bbox.to_xywh(),
            score: td.detection.confidence,
            category_id: index.category_id_or_default(&td.detection.class_label),
            track_id: td.track_id.0,
            position_in_track: td.position_in_track,
        });
    }
    let tracks = output
        .tracks
        .iter()
        .map(|track| TrackScores {
            track_id: track.track_id.0,
            frame_indices: track.history.iter().map(|o| o.frame_index).collect(),
            scores: track.confidences(),
        })
        .collect();
    let frame_size = sequence.frame_size();
    Ok(TrackedVideo {
        video_id: video_id.to_owned(),
        frame_width: frame_size.width(),
        frame_height: frame_size.height(),
        records,
        tracks,
    })
}

/// Boosts every record of a tracked file against the file's own track
/// table. Record order is preserved.
///
/// The file was validated on read (or built by [`track_videos`]), so any
/// failure here is internal.
pub fn boost_records(
    file: &TrackedFile,
    mode: BoostMode,
) -> Result<Vec<BoostedRecord>, CliError> {
    let mut out = Vec::new();
    for video in &file.videos {
        let mut boosted_by_track: BTreeMap<u64, Vec<f64>> = BTreeMap::new();
        for track in &video.tracks {
            let boosted = match mode {
                BoostMode::Offline => boost_track(&track.scores),
                BoostMode::Causal => boost_track_causal(&track.scores),
            }
            .map_err(internal)?;
            boosted_by_track.insert(track.track_id, boosted);
        }
        for record in &video.records {
            let score = boosted_by_track
                .get(&record.track_id)
                .and_then(|scores| scores.get(record.position_in_track))
                .copied()
                .ok_or_else(|| {
                    internal(anyhow!(
                        "video {:?}: record resolves to no boosted score (track {}, position {})",
                        video.video_id,
                        record.track_id,
                        record.position_in_track
                    ))
                })?;
            out.push(BoostedRecord {
                image_id: record.image_id,
                category_id: record.category_id,
                bbox: record.bbox,
                score,
                track_id: record.track_id,
                original_score: record.score,
            });
        }
    }
    Ok(out)
}

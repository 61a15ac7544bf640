//! Multi-object tracking by detection.
//!
//! Each live track holds a constant-velocity Kalman belief over its box
//! center plus a hit counter. Per frame: predict every track, greedily
//! associate detections by center distance, update matched tracks, decay
//! unmatched ones, spawn tentative tracks from leftover detections, and
//! emit the frame's detections for confirmed tracks.
//!
//! The tracker never invents boxes: output boxes are always detector
//! outputs, carried through unchanged. The Kalman state only steers
//! association.

pub mod association;
pub mod kalman;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::detection::{Detection, DetectionSequence};
use crate::geometry::FrameSize;

pub use association::{associate, AssociationResult};
pub use kalman::{predict, update, KalmanState, INITIAL_VELOCITY_VARIANCE_FACTOR};

/// Tracker tuning knobs.
///
/// The defaults are the operating point the toolkit was tuned at; see the
/// field docs for what each knob trades off.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrackerConfig {
    /// Kalman measurement noise variance (R). Smaller values trust the
    /// detector's box centers more.
    pub measurement_uncertainty: f64,
    /// Kalman process noise variance (Q). Larger values let tracks
    /// maneuver harder between frames.
    pub process_uncertainty: f64,
    /// Association gate as a fraction of the frame diagonal.
    pub distance_threshold_frac: f64,
    /// Ceiling on the hit counter: bounds how many consecutive missed
    /// frames a track survives.
    pub hit_counter_max: u32,
    /// Frames of existence (and matches) required before a track is
    /// confirmed and starts emitting. Must stay below `hit_counter_max`.
    pub initialization_delay: u32,
}

impl Default for TrackerConfig {
    fn default() -> Self {
        Self {
            measurement_uncertainty: 0.2,
            process_uncertainty: 1.0,
            distance_threshold_frac: 0.05,
            hit_counter_max: 15,
            initialization_delay: 7,
        }
    }
}

impl TrackerConfig {
    /// Checks the numeric invariants. Called by [`Tracker::new`]; call it
    /// directly when accepting configs from files.
    pub fn validate(&self) -> Result<(), TrackerError> {
        for (name, value) in [
            ("measurement_uncertainty", self.measurement_uncertainty),
            ("process_uncertainty", self.process_uncertainty),
            ("distance_threshold_frac", self.distance_threshold_frac),
        ] {
            if !(value.is_finite() && value > 0.0) {
                return Err(TrackerError::NonPositiveParameter {
                    name,
                    value,
                });
            }
        }
        if self.hit_counter_max == 0 {
            return Err(TrackerError::ZeroHitCounterMax);
        }
        if self.initialization_delay >= self.hit_counter_max {
            return Err(TrackerError::DelayNotBelowMax {
                delay: self.initialization_delay,
                max: self.hit_counter_max,
            });
        }
        Ok(())
    }
}

/// Track identifier, unique within one tracked sequence, starting at 1.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct TrackId(pub u64);

impl fmt::Display for TrackId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Lifecycle stage of a track.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrackStatus {
    /// Accumulating evidence; not yet emitting.
    Tentative,
    /// Past the initialization delay; emits its matched detections.
    Confirmed,
    /// Hit counter reached zero.
    Dead,
}

/// One detector observation bound to a track.
#[derive(Debug, Clone, PartialEq)]
pub struct TrackObservation {
    pub frame_index: u64,
    pub detection: Detection,
}

/// A single tracked object and its full observation history.
#[derive(Debug, Clone)]
pub struct Track {
    pub track_id: TrackId,
    pub state: KalmanState,
    pub status: TrackStatus,
    pub hit_counter: u32,
    /// Frames since creation (0 on the spawn frame).
    pub age: u32,
    /// Total observations bound to this track, including the founding one.
    pub total_matches: u32,
    /// Every observation in frame order, including those recorded while
    /// the track was still tentative.
    pub history: Vec<TrackObservation>,
    ever_confirmed: bool,
}

impl Track {
    fn spawn(track_id: TrackId, frame_index: u64, det: &Detection, config: &TrackerConfig) -> Self {
        let (cx, cy) = det.bbox.center();
        Self {
            track_id,
            state: KalmanState::new_initial(cx, cy, config),
            status: TrackStatus::Tentative,
            hit_counter: 1,
            age: 0,
            total_matches: 1,
            history: vec![TrackObservation {
                frame_index,
                detection: det.clone(),
            }],
            ever_confirmed: false,
        }
    }

    /// Confidence of every observation, in frame order. This is the score
    /// vector that confidence boosting consumes.
    pub fn confidences(&self) -> Vec<f64> {
        self.history
            .iter()
            .map(|obs| obs.detection.confidence)
            .collect()
    }

    /// True if the track ever reached confirmed status (survives death).
    pub fn was_confirmed(&self) -> bool {
        self.ever_confirmed
    }
}

/// A detection attributed to a confirmed track — the tracker's output unit.
#[derive(Debug, Clone, PartialEq)]
pub struct TrackedDetection {
    /// The detector's box and score, unchanged.
    pub detection: Detection,
    pub track_id: TrackId,
    /// Index of this observation within its track's history.
    pub position_in_track: usize,
}

/// Everything `run_sequence` produces: the emitted detections in frame
/// order, plus every track that ever reached confirmation (alive or dead),
/// ascending by id.
#[derive(Debug, Clone)]
pub struct TrackingOutput {
    pub tracked: Vec<TrackedDetection>,
    pub tracks: Vec<Track>,
}

/// Tracker errors: bad config or a misuse of the stepping API.
#[derive(Debug, Error)]
pub enum TrackerError {
    #[error("tracker parameter {name} must be positive and finite, got {value}")]
    NonPositiveParameter { name: &'static str, value: f64 },
    #[error("hit_counter_max must be at least 1")]
    ZeroHitCounterMax,
    #[error("initialization_delay ({delay}) must be strictly below hit_counter_max ({max})")]
    DelayNotBelowMax { delay: u32, max: u32 },
    #[error("step frame indices must strictly increase, got {got} after {last}")]
    NonMonotonicStep { last: u64, got: u64 },
    #[error("detection carries frame index {got}, but this step is frame {expected}")]
    WrongFrameIndex { expected: u64, got: u64 },
    #[error("frame {frame_index}: detection box lies outside the {frame} frame")]
    DetectionOutsideFrame { frame_index: u64, frame: FrameSize },
}

/// Streaming multi-object tracker over one video.
#[derive(Debug)]
pub struct Tracker {
    config: TrackerConfig,
    frame_size: FrameSize,
    live: Vec<Track>,
    finished: Vec<Track>,
    next_id: u64,
    last_frame: Option<u64>,
}

impl Tracker {
    pub fn new(frame_size: FrameSize, config: TrackerConfig) -> Result<Self, TrackerError> {
        config.validate()?;
        Ok(Self {
            config,
            frame_size,
            live: Vec::new(),
            finished: Vec::new(),
            next_id: 1,
            last_frame: None,
        })
    }

    pub fn config(&self) -> &TrackerConfig {
        &self.config
    }

    /// Live (tentative or confirmed) tracks, ascending by id.
    pub fn live_tracks(&self) -> &[Track] {
        &self.live
    }

    /// Advances the tracker by one frame and returns the detections emitted
    /// for confirmed tracks this frame, ascending by track id.
    ///
    /// Each call is one tick of the motion model: gaps in `frame_index` are
    /// allowed (the index is recorded, not interpolated over). Detections
    /// must carry this frame's index and lie inside the frame.
    pub fn step(
        &mut self,
        frame_index: u64,
        detections: &[Detection],
    ) -> Result<Vec<TrackedDetection>, TrackerError> {
        if let Some(last) = self.last_frame {
            if frame_index <= last {
                return Err(TrackerError::NonMonotonicStep {
                    last,
                    got: frame_index,
                });
            }
        }
        for det in detections {
            if det.frame_index != frame_index {
                return Err(TrackerError::WrongFrameIndex {
                    expected: frame_index,
                    got: det.frame_index,
                });
            }
            if !det.bbox.fits_in(self.frame_size) {
                return Err(TrackerError::DetectionOutsideFrame {
                    frame_index,
                    frame: self.frame_size,
                });
            }
        }

        // 1. One tick for every pre-existing track: age and predict.
        for track in &mut self.live {
            track.age += 1;
            track.state = predict(&track.state, &self.config);
        }

        // 2. Assign detections to predicted centers.
        let predictions: Vec<(TrackId, (f64, f64))> = self
            .live
            .iter()
            .map(|t| (t.track_id, t.state.position()))
            .collect();
        let assignment = associate(&predictions, detections, self.frame_size, &self.config);

        // 3. Matched tracks: correct the belief and record the observation.
        for &(track_id, det_index) in &assignment.matches {
            let track = self
                .live
                .iter_mut()
                .find(|t| t.track_id == track_id)
                .expect("association returns only live track ids");
            let det = &detections[det_index];
            track.state = update(&track.state, det.bbox.center(), &self.config);
            track.hit_counter = (track.hit_counter + 1).min(self.config.hit_counter_max);
            track.total_matches += 1;
            track.history.push(TrackObservation {
                frame_index,
                detection: det.clone(),
            });
        }

        // 4. Missed tracks decay; a track dies when its counter hits zero.
        for track_id in &assignment.unmatched_tracks {
            let track = self
                .live
                .iter_mut()
                .find(|t| t.track_id == *track_id)
                .expect("association returns only live track ids");
            track.hit_counter -= 1;
            if track.hit_counter == 0 {
                track.status = TrackStatus::Dead;
            }
        }

        // 5. Leftover detections found new tentative tracks.
        for det_index in &assignment.unmatched_detections {
            let id = TrackId(self.next_id);
            self.next_id += 1;
            self.live
                .push(Track::spawn(id, frame_index, &detections[*det_index], &self.config));
        }

        // 6. Promote tracks that have existed and matched long enough. The
        // check also runs on miss frames: a track can confirm while missed
        // and then emit on its next match.
        for track in &mut self.live {
            if track.status == TrackStatus::Tentative
                && track.age >= self.config.initialization_delay
                && track.total_matches >= self.config.initialization_delay
            {
                track.status = TrackStatus::Confirmed;
                track.ever_confirmed = true;
            }
        }

        // 7. Emit this frame's observation of every confirmed track. `live`
        // stays ascending by id (spawns append), so the output is ordered.
        let mut emitted = Vec::new();
        for track in &self.live {
            if track.status != TrackStatus::Confirmed {
                continue;
            }
            let last = track.history.last().expect("tracks always hold >= 1 observation");
            if last.frame_index == frame_index {
                emitted.push(TrackedDetection {
                    detection: last.detection.clone(),
                    track_id: track.track_id,
                    position_in_track: track.history.len() - 1,
                });
            }
        }

        // 8. Retire the dead; only ever-confirmed tracks are kept for the
        // final track table.
        let mut index = 0;
        while index < self.live.len() {
            if self.live[index].status == TrackStatus::Dead {
                let track = self.live.remove(index);
                if track.was_confirmed() {
                    self.finished.push(track);
                }
            } else {
                index += 1;
            }
        }

        self.last_frame = Some(frame_index);
        Ok(emitted)
    }

    /// Consumes the tracker, returning every track that ever confirmed,
    /// ascending by id.
    pub fn into_tracks(self) -> Vec<Track> {
        let mut tracks: Vec<Track> = self
            .finished
            .into_iter()
            .chain(self.live.into_iter().filter(Track::was_confirmed))
            .collect();
        tracks.sort_by_key(|t| t.track_id);
        tracks
    }
}

/// Runs the tracker over a whole sequence.
///
/// Every emitted box is bit-identical to some input detection (the tracker
/// only attributes, never repaints), and every emitted `track_id` appears in
/// the returned track table.
pub fn run_sequence(
    sequence: &DetectionSequence,
    config: &TrackerConfig,
) -> Result<TrackingOutput, TrackerError> {
    let mut tracker = Tracker::new(sequence.frame_size(), config.clone())?;
    let mut tracked = Vec::new();
    for frame in sequence.frames() {
        tracked.extend(tracker.step(frame.frame_index, &frame.detections)?);
    }
    Ok(TrackingOutput {
        tracked,
        tracks: tracker.into_tracks(),
    })
}

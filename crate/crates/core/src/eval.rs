//! Average-precision evaluation of detections against ground truth, with
//! size-binned breakdowns.
//!
//! Protocol: detections are matched to ground truths greedily per frame in
//! descending confidence order (IoU at or above the threshold, best IoU
//! first). AP integrates the precision envelope over a 101-point recall
//! grid. Size bins restrict the ground-truth side only: a detection matched
//! to an out-of-bin ground truth is ignored for that bin, while an
//! unmatched detection counts as a false positive in every bin.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::detection::FrameKey;
use crate::geometry::{area_category, iou, BoundingBox, SizeCategory};

/// Ground-truth boxes grouped by frame.
///
/// A registered frame with no boxes is meaningful: detections on it are
/// false positives. Detections on frames *not* registered at all are
/// excluded from scoring entirely (and reported), so a partially annotated
/// dataset doesn't poison precision.
#[derive(Debug, Clone, Default)]
pub struct GroundTruthSet {
    frames: BTreeMap<FrameKey, Vec<BoundingBox>>,
}

impl GroundTruthSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Ensures `key` exists, with no boxes yet.
    pub fn register_frame(&mut self, key: FrameKey) {
        self.frames.entry(key).or_default();
    }

    /// Appends a box to `key`, registering the frame if needed.
    pub fn add_box(&mut self, key: FrameKey, bbox: BoundingBox) {
        self.frames.entry(key).or_default().push(bbox);
    }

    pub fn contains_frame(&self, key: &FrameKey) -> bool {
        self.frames.contains_key(key)
    }

    pub fn boxes(&self, key: &FrameKey) -> Option<&[BoundingBox]> {
        self.frames.get(key).map(Vec::as_slice)
    }

    pub fn frames(&self) -> impl Iterator<Item = (&FrameKey, &[BoundingBox])> {
        self.frames.iter().map(|(k, v)| (k, v.as_slice()))
    }

    pub fn num_frames(&self) -> usize {
        self.frames.len()
    }

    pub fn num_boxes(&self) -> usize {
        self.frames.values().map(Vec::len).sum()
    }
}

/// A detection prepared for evaluation: frame, box, and score.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalDetection {
    pub frame: FrameKey,
    pub bbox: BoundingBox,
    pub confidence: f64,
}

/// One cumulative point on the precision/recall curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PrPoint {
    pub recall: f64,
    pub precision: f64,
}

/// Evaluation metrics. `None` AP values mean the corresponding ground-truth
/// population is empty, which is reported as `undefined` in text and `null`
/// in JSON rather than a misleading zero.
#[derive(Debug, Clone, Serialize)]
pub struct EvalReport {
    pub iou_threshold: f64,
    pub ap_50: Option<f64>,
    pub ap_small: Option<f64>,
    pub ap_medium: Option<f64>,
    pub ap_large: Option<f64>,
    pub num_gt_small: u64,
    pub num_gt_medium: u64,
    pub num_gt_large: u64,
    pub num_gt_total: u64,
    /// Cumulative precision/recall points of the overall evaluation, one
    /// per scored detection, in descending confidence order.
    pub pr_curve: Vec<PrPoint>,
}

impl EvalReport {
    /// Key-value text rendering, one metric per line. AP values of `None`
    /// print as `undefined`.
    pub fn to_text(&self) -> String {
        fn ap_line(name: &str, v: Option<f64>) -> String {
            match v {
                Some(v) => format!("{name} {v}"),
                None => format!("{name} undefined"),
            }
        }
        let mut lines = vec![
            format!("iou_threshold {}", self.iou_threshold),
            ap_line("ap_50", self.ap_50),
            ap_line("ap_small", self.ap_small),
            ap_line("ap_medium", self.ap_medium),
            ap_line("ap_large", self.ap_large),
            format!("num_gt_small {}", self.num_gt_small),
            format!("num_gt_medium {}", self.num_gt_medium),
            format!("num_gt_large {}", self.num_gt_large),
            format!("num_gt_total {}", self.num_gt_total),
        ];
        lines.push(String::new());
        lines.join("\n")
    }
}

/// Report plus scoring diagnostics.
#[derive(Debug, Clone, Serialize)]
pub struct Evaluation {
    #[serde(flatten)]
    pub report: EvalReport,
    /// Frames that carried detections but are absent from the ground-truth
    /// set; their detections were excluded from scoring.
    pub ignored_frames: Vec<FrameKey>,
}

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("IoU threshold must lie in (0, 1], got {0}")]
    BadIouThreshold(f64),
    #[error("detection on {frame} has a non-finite confidence")]
    NonFiniteConfidence { frame: FrameKey },
}

/// Matches one frame's detections against its ground truths, returning the
/// claimed ground-truth index per detection (input order).
///
/// Detections take turns in descending confidence order (ties: input
/// order); each claims the unclaimed ground truth with the highest IoU at
/// or above `iou_threshold` (ties: lowest index). Each ground truth is
/// claimed at most once.
pub fn match_frame_assignments(
    detections: &[(BoundingBox, f64)],
    ground_truths: &[BoundingBox],
    iou_threshold: f64,
) -> Vec<Option<usize>> {
    let mut order: Vec<usize> = (0..detections.len()).collect();
    order.sort_by(|a, b| detections[*b].1.total_cmp(&detections[*a].1));

    let mut claimed = vec![false; ground_truths.len()];
    let mut assignment = vec![None; detections.len()];
    for det_index in order {
        let det_box = &detections[det_index].0;
        let mut best: Option<(usize, f64)> = None;
        for (gt_index, gt_box) in ground_truths.iter().enumerate() {
            if claimed[gt_index] {
                continue;
            }
            let overlap = iou(det_box, gt_box);
            if overlap >= iou_threshold && best.map_or(true, |(_, b)| overlap > b) {
                best = Some((gt_index, overlap));
            }
        }
        if let Some((gt_index, _)) = best {
            claimed[gt_index] = true;
            assignment[det_index] = Some(gt_index);
        }
    }
    assignment
}

/// True/false-positive flags per detection — [`match_frame_assignments`]
/// reduced to whether each detection claimed a ground truth.
pub fn match_frame(
    detections: &[(BoundingBox, f64)],
    ground_truths: &[BoundingBox],
    iou_threshold: f64,
) -> Vec<bool> {
    match_frame_assignments(detections, ground_truths, iou_threshold)
        .iter()
        .map(Option::is_some)
        .collect()
}

/// Average precision over a 101-point recall grid.
///
/// `records` holds `(confidence, is_true_positive)` per scored detection;
/// they are ranked by descending confidence with ties kept in input order.
/// Returns `None` when `num_gt` is zero (recall is undefined), `Some(0.0)`
/// when there are no true positives.
pub fn average_precision(records: &[(f64, bool)], num_gt: u64) -> Option<f64> {
    if num_gt == 0 {
        return None;
    }
    let mut order: Vec<usize> = (0..records.len()).collect();
    order.sort_by(|a, b| records[*b].0.total_cmp(&records[*a].0));

    let mut recalls = Vec::with_capacity(records.len());
    let mut precisions = Vec::with_capacity(records.len());
    let mut tp = 0u64;
    for (rank, index) in order.iter().enumerate() {
        if records[*index].1 {
            tp += 1;
        }
        recalls.push(tp as f64 / num_gt as f64);
        precisions.push(tp as f64 / (rank as f64 + 1.0));
    }

    // Precision envelope: best precision achievable at or beyond each rank.
    let mut envelope = precisions.clone();
    for i in (0..envelope.len().saturating_sub(1)).rev() {
        envelope[i] = envelope[i].max(envelope[i + 1]);
    }

    let mut total = 0.0;
    for i in 0..=100u32 {
        let r = f64::from(i) / 100.0;
        // First rank reaching recall r; contributes its envelope precision.
        let k = recalls.partition_point(|rec| *rec < r);
        if k < recalls.len() {
            total += envelope[k];
        }
    }
    Some(total / 101.0)
}

/// Evaluates detections against ground truth at the given IoU threshold.
///
/// Frames carrying detections but missing from `ground_truths` are skipped
/// and listed in the result's `ignored_frames`. All registered ground
/// truths count toward recall, including those on frames with no
/// detections at all.
pub fn evaluate(
    detections: &[EvalDetection],
    ground_truths: &GroundTruthSet,
    iou_threshold: f64,
) -> Result<Evaluation, EvalError> {
    if !(iou_threshold.is_finite() && 0.0 < iou_threshold && iou_threshold <= 1.0) {
        return Err(EvalError::BadIouThreshold(iou_threshold));
    }
    for det in detections {
        if !det.confidence.is_finite() {
            return Err(EvalError::NonFiniteConfidence {
                frame: det.frame.clone(),
            });
        }
    }

    // Group scored detections per frame, remembering their input position so
    // ranking ties stay deterministic.
    let mut per_frame: BTreeMap<&FrameKey, Vec<usize>> = BTreeMap::new();
    let mut ignored: BTreeSet<FrameKey> = BTreeSet::new();
    for (index, det) in detections.iter().enumerate() {
        if ground_truths.contains_frame(&det.frame) {
            per_frame.entry(&det.frame).or_default().push(index);
        } else {
            ignored.insert(det.frame.clone());
        }
    }

    // matched[i]: size bin of the ground truth detection i claimed, if any.
    // None for unmatched, outer None for excluded (unannotated frame).
    let mut matched: Vec<Option<Option<SizeCategory>>> = vec![None; detections.len()];
    for (frame, indices) in &per_frame {
        let gts = ground_truths.boxes(frame).expect("frame presence checked above");
        let frame_dets: Vec<(BoundingBox, f64)> = indices
            .iter()
            .map(|i| (detections[*i].bbox, detections[*i].confidence))
            .collect();
        let assignment = match_frame_assignments(&frame_dets, gts, iou_threshold);
        for (slot, gt_index) in indices.iter().zip(assignment) {
            matched[*slot] = Some(gt_index.map(|g| area_category(&gts[g])));
        }
    }

    // Scored records in input order: (confidence, claimed bin or None).
    let records: Vec<(f64, Option<SizeCategory>)> = detections
        .iter()
        .zip(&matched)
        .filter_map(|(det, m)| m.as_ref().map(|bin| (det.confidence, *bin)))
        .collect();

    let mut num_gt = BTreeMap::from([
        (SizeCategory::Small, 0u64),
        (SizeCategory::Medium, 0u64),
        (SizeCategory::Large, 0u64),
    ]);
    for (_, boxes) in ground_truths.frames() {
        for b in boxes {
            *num_gt.get_mut(&area_category(b)).expect("all bins pre-seeded") += 1;
        }
    }
    let num_gt_total: u64 = num_gt.values().sum();

    let overall: Vec<(f64, bool)> = records
        .iter()
        .map(|(conf, bin)| (*conf, bin.is_some()))
        .collect();

    let bin_ap = |bin: SizeCategory| {
        let bin_records: Vec<(f64, bool)> = records
            .iter()
            .filter_map(|(conf, matched_bin)| match matched_bin {
                Some(b) if *b == bin => Some((*conf, true)),
                Some(_) => None, // matched out-of-bin: ignored here
                None => Some((*conf, false)),
            })
            .collect();
        average_precision(&bin_records, num_gt[&bin])
    };

    // PR curve over the overall records, descending confidence.
    let mut order: Vec<usize> = (0..overall.len()).collect();
    order.sort_by(|a, b| overall[*b].0.total_cmp(&overall[*a].0));
    let mut pr_curve = Vec::with_capacity(overall.len());
    let mut tp = 0u64;
    for (rank, index) in order.iter().enumerate() {
        if overall[*index].1 {
            tp += 1;
        }
        pr_curve.push(PrPoint {
            recall: if num_gt_total == 0 { 0.0 } else { tp as f64 / num_gt_total as f64 },
            precision: tp as f64 / (rank as f64 + 1.0),
        });
    }

    let report = EvalReport {
        iou_threshold,
        ap_50: average_precision(&overall, num_gt_total),
        ap_small: bin_ap(SizeCategory::Small),
        ap_medium: bin_ap(SizeCategory::Medium),
        ap_large: bin_ap(SizeCategory::Large),
        num_gt_small: num_gt[&SizeCategory::Small],
        num_gt_medium: num_gt[&SizeCategory::Medium],
        num_gt_large: num_gt[&SizeCategory::Large],
        num_gt_total,
        pr_curve,
    };
    Ok(Evaluation {
        report,
        ignored_frames: ignored.into_iter().collect(),
    })
}

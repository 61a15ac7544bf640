//! COCO-style annotation files and detection-results arrays.
//!
//! Video structure is recovered from image file names of the form
//! `video_dir/000123.jpg` (directory = video id, numeric stem = frame
//! index); datasets that don't follow that layout can supply an explicit
//! frame map instead.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::detection::{Detection, DetectionSequence, FrameKey, SequenceFrame, DEFAULT_CLASS};
use crate::eval::GroundTruthSet;
use crate::geometry::{BoundingBox, FrameSize};

use super::{FormatError, IoDiagnostics};

/// One image entry from an annotation file, resolved to a video frame.
#[derive(Debug, Clone)]
pub struct CocoImage {
    pub id: i64,
    pub frame: FrameKey,
    pub size: FrameSize,
    pub file_name: String,
}

/// Lookup structure binding image ids, video frames, and categories.
#[derive(Debug, Clone, Default)]
pub struct CocoIndex {
    images: BTreeMap<i64, CocoImage>,
    by_frame: BTreeMap<FrameKey, i64>,
    categories: BTreeMap<i64, String>,
}

impl CocoIndex {
    pub fn image(&self, id: i64) -> Option<&CocoImage> {
        self.images.get(&id)
    }

    pub fn image_id(&self, frame: &FrameKey) -> Option<i64> {
        self.by_frame.get(frame).copied()
    }

    pub fn images(&self) -> impl Iterator<Item = &CocoImage> {
        self.images.values()
    }

    pub fn num_images(&self) -> usize {
        self.images.len()
    }

    pub fn category_name(&self, id: i64) -> Option<&str> {
        self.categories.get(&id).map(String::as_str)
    }

    pub fn category_id_for(&self, name: &str) -> Option<i64> {
        self.categories
            .iter()
            .find(|(_, n)| n.as_str() == name)
            .map(|(id, _)| *id)
    }

    /// Category id to write for a class label: the label's id if declared,
    /// otherwise the sole declared category, otherwise 1.
    pub fn category_id_or_default(&self, name: &str) -> i64 {
        if let Some(id) = self.category_id_for(name) {
            return id;
        }
        if self.categories.len() == 1 {
            return *self.categories.keys().next().expect("len checked");
        }
        1
    }

    /// Every video id in the image table.
    pub fn videos(&self) -> BTreeSet<String> {
        self.images
            .values()
            .map(|image| image.frame.video_id.clone())
            .collect()
    }

    /// All images of one video, ascending by frame index.
    pub fn frames_of_video(&self, video_id: &str) -> Vec<&CocoImage> {
        let mut frames: Vec<&CocoImage> = self
            .images
            .values()
            .filter(|img| img.frame.video_id == video_id)
            .collect();
        frames.sort_by_key(|img| img.frame.frame_index);
        frames
    }

    /// Index for a sequence with no annotation file (the MOT path), where
    /// image ids are synthesized as `frame_index + 1`.
    pub fn synthetic(
        video_id: &str,
        frame_size: FrameSize,
        frame_indices: impl IntoIterator<Item = u64>,
    ) -> Self {
        let mut index = Self::default();
        for frame_index in frame_indices {
            let frame = FrameKey::new(video_id, frame_index);
            let id = frame_index as i64 + 1;
            index.by_frame.insert(frame.clone(), id);
            index.images.insert(
                id,
                CocoImage {
                    id,
                    frame,
                    size: frame_size,
                    file_name: String::new(),
                },
            );
        }
        index
    }
}

/// Explicit image-id → video/frame mapping for datasets whose file names
/// don't encode it. JSON: `[{"image_id": 7, "video_id": "a", "frame_index": 3}, ...]`.
#[derive(Debug, Clone, Default)]
pub struct FrameMap {
    entries: BTreeMap<i64, FrameKey>,
}

impl FrameMap {
    pub fn lookup(&self, image_id: i64) -> Option<&FrameKey> {
        self.entries.get(&image_id)
    }
}

pub fn read_frame_map(path: &Path) -> Result<FrameMap, FormatError> {
    #[derive(Deserialize)]
    struct RawEntry {
        image_id: i64,
        video_id: String,
        frame_index: u64,
    }

    let values: Vec<Value> = parse_json_file(path)?;
    let mut entries = BTreeMap::new();
    for (index, value) in values.iter().enumerate() {
        let raw: RawEntry = parse_record(path, "frame_map", index, value)?;
        if entries
            .insert(raw.image_id, FrameKey::new(raw.video_id, raw.frame_index))
            .is_some()
        {
            return Err(FormatError::DuplicateImageId(raw.image_id));
        }
    }
    Ok(FrameMap { entries })
}

/// Parsed annotation file: ground-truth boxes, the image/category index,
/// and any repairs made along the way.
#[derive(Debug, Clone)]
pub struct CocoGroundTruth {
    pub ground_truth: GroundTruthSet,
    pub index: CocoIndex,
    pub diagnostics: IoDiagnostics,
}

/// Reads a COCO annotation file (`images` + `annotations` + `categories`).
///
/// Every image is registered as a frame (images without annotations are
/// genuine empty frames). Degenerate ground-truth boxes are dropped with a
/// diagnostic; boxes overhanging the frame are clamped and counted.
pub fn read_coco_groundtruth(
    path: &Path,
    frame_map: Option<&FrameMap>,
) -> Result<CocoGroundTruth, FormatError> {
    #[derive(Deserialize)]
    struct RawDataset {
        images: Vec<Value>,
        annotations: Vec<Value>,
        #[serde(default)]
        categories: Vec<Value>,
    }
    #[derive(Deserialize)]
    struct RawImage {
        id: i64,
        width: u32,
        height: u32,
        file_name: String,
    }
    #[derive(Deserialize)]
    struct RawAnnotation {
        image_id: i64,
        bbox: [f64; 4],
    }
    #[derive(Deserialize)]
    struct RawCategory {
        id: i64,
        name: String,
    }

    let raw: RawDataset = parse_json_file(path)?;
    let mut diagnostics = IoDiagnostics::default();

    let mut categories = BTreeMap::new();
    for (index, value) in raw.categories.iter().enumerate() {
        let cat: RawCategory = parse_record(path, "categories", index, value)?;
        if categories.insert(cat.id, cat.name).is_some() {
            return Err(FormatError::Record {
                path: path.to_path_buf(),
                section: "categories",
                index,
                message: "duplicate category id".into(),
            });
        }
    }

    let mut images = BTreeMap::new();
    let mut by_frame = BTreeMap::new();
    for (index, value) in raw.images.iter().enumerate() {
        let img: RawImage = parse_record(path, "images", index, value)?;
        let size = FrameSize::new(img.width, img.height).map_err(|e| FormatError::Record {
            path: path.to_path_buf(),
            section: "images",
            index,
            message: e.to_string(),
        })?;
        let frame = match frame_map.and_then(|m| m.lookup(img.id)) {
            Some(key) => key.clone(),
            None => frame_key_from_file_name(&img.file_name).ok_or_else(|| {
                FormatError::BadFileName {
                    image_id: img.id,
                    file_name: img.file_name.clone(),
                }
            })?,
        };
        if by_frame.insert(frame.clone(), img.id).is_some() {
            return Err(FormatError::DuplicateFrame {
                video_id: frame.video_id,
                frame_index: frame.frame_index,
            });
        }
        let previous = images.insert(
            img.id,
            CocoImage {
                id: img.id,
                frame,
                size,
                file_name: img.file_name,
            },
        );
        if previous.is_some() {
            return Err(FormatError::DuplicateImageId(img.id));
        }
    }

    let index = CocoIndex {
        images,
        by_frame,
        categories,
    };

    let mut ground_truth = GroundTruthSet::new();
    for image in index.images() {
        ground_truth.register_frame(image.frame.clone());
    }

    for (ann_index, value) in raw.annotations.iter().enumerate() {
        let ann: RawAnnotation = parse_record(path, "annotations", ann_index, value)?;
        let image = index.image(ann.image_id).ok_or(FormatError::UnknownImageId {
            path: path.to_path_buf(),
            record: ann_index,
            image_id: ann.image_id,
        })?;
        let [x, y, w, h] = ann.bbox;
        let bbox = match BoundingBox::from_xywh(x, y, w, h) {
            Ok(b) => b,
            Err(_) => {
                diagnostics.rejected.push(format!(
                    "annotations[{ann_index}] on {}: degenerate bbox [{x}, {y}, {w}, {h}] dropped",
                    image.frame
                ));
                continue;
            }
        };
        let (bbox, moved) = match bbox.clamp_to(image.size) {
            Ok(pair) => pair,
            Err(_) => {
                diagnostics.rejected.push(format!(
                    "annotations[{ann_index}] on {}: bbox lies entirely outside the frame, dropped",
                    image.frame
                ));
                continue;
            }
        };
        if moved {
            diagnostics.clamped_boxes += 1;
        }
        ground_truth.add_box(image.frame.clone(), bbox);
    }

    Ok(CocoGroundTruth {
        ground_truth,
        index,
        diagnostics,
    })
}

/// Parsed detection-results array, grouped into per-video sequences.
#[derive(Debug, Clone)]
pub struct CocoDetections {
    /// One sequence per video that has at least one surviving detection.
    /// Each sequence materializes *every* frame of its video from the
    /// index, so detector gaps are visible to the tracker as empty frames.
    pub sequences: BTreeMap<String, DetectionSequence>,
    pub diagnostics: IoDiagnostics,
}

/// Reads a COCO detection-results array (`[{image_id, bbox, score, ...}]`)
/// against the index from its annotation file.
///
/// Scores are clamped into `[0, 1]` and boxes to the frame, with counts;
/// degenerate boxes are dropped with a diagnostic. Unknown image ids and
/// malformed records are hard errors. Extra fields per record are ignored,
/// so boosted output files read back fine.
pub fn read_coco_detections(
    path: &Path,
    index: &CocoIndex,
) -> Result<CocoDetections, FormatError> {
    #[derive(Deserialize)]
    struct RawResult {
        image_id: i64,
        bbox: [f64; 4],
        score: f64,
        #[serde(default)]
        category_id: Option<i64>,
    }

    let values: Vec<Value> = parse_json_file(path)?;
    let mut diagnostics = IoDiagnostics::default();

    // video -> frame -> detections, in record order within a frame.
    let mut grouped: BTreeMap<String, BTreeMap<u64, Vec<Detection>>> = BTreeMap::new();
    for (rec_index, value) in values.iter().enumerate() {
        let raw: RawResult = parse_record(path, "results", rec_index, value)?;
        let image = index.image(raw.image_id).ok_or(FormatError::UnknownImageId {
            path: path.to_path_buf(),
            record: rec_index,
            image_id: raw.image_id,
        })?;
        if !raw.score.is_finite() {
            return Err(FormatError::Record {
                path: path.to_path_buf(),
                section: "results",
                index: rec_index,
                message: format!("non-finite score {}", raw.score),
            });
        }
        let score = raw.score.clamp(0.0, 1.0);
        if score != raw.score {
            diagnostics.clamped_scores += 1;
        }
        let [x, y, w, h] = raw.bbox;
        let bbox = match BoundingBox::from_xywh(x, y, w, h) {
            Ok(b) => b,
            Err(_) => {
                diagnostics.rejected.push(format!(
                    "results[{rec_index}] on {}: degenerate bbox [{x}, {y}, {w}, {h}] dropped",
                    image.frame
                ));
                continue;
            }
        };
        let (bbox, moved) = match bbox.clamp_to(image.size) {
            Ok(pair) => pair,
            Err(_) => {
                diagnostics.rejected.push(format!(
                    "results[{rec_index}] on {}: bbox lies entirely outside the frame, dropped",
                    image.frame
                ));
                continue;
            }
        };
        if moved {
            diagnostics.clamped_boxes += 1;
        }
        let class_label = raw
            .category_id
            .and_then(|id| index.category_name(id))
            .unwrap_or(DEFAULT_CLASS);
        let detection = Detection::new(image.frame.frame_index, bbox, score, class_label)
            .expect("score clamped into range above");
        grouped
            .entry(image.frame.video_id.clone())
            .or_default()
            .entry(image.frame.frame_index)
            .or_default()
            .push(detection);
    }

    let mut sequences = BTreeMap::new();
    for (video_id, mut frames) in grouped {
        let images = index.frames_of_video(&video_id);
        let size = images
            .first()
            .map(|img| img.size)
            .expect("video came from the index");
        // A sequence has one geometry; the image table at large may mix
        // sizes freely, but not within a video that is being tracked.
        if images.iter().any(|img| img.size != size) {
            return Err(FormatError::InconsistentFrameSize(video_id));
        }
        let sequence_frames: Vec<SequenceFrame> = images
            .iter()
            .map(|img| SequenceFrame {
                frame_index: img.frame.frame_index,
                detections: frames.remove(&img.frame.frame_index).unwrap_or_default(),
            })
            .collect();
        let sequence = DetectionSequence::new(size, sequence_frames)
            .expect("index frames are unique and clamped boxes fit");
        sequences.insert(video_id, sequence);
    }

    Ok(CocoDetections {
        sequences,
        diagnostics,
    })
}

/// A boosted detection ready for the results file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoostedRecord {
    pub image_id: i64,
    pub category_id: i64,
    /// `[x, y, w, h]`.
    pub bbox: [f64; 4],
    /// Boosted confidence.
    pub score: f64,
    pub track_id: u64,
    /// The detector's score before boosting.
    pub original_score: f64,
}

/// Writes boosted detections as a COCO results array (with `track_id` and
/// `original_score` carried as extra fields).
///
/// Re-checks the boosting contract on the way out: a record whose score
/// dropped below its original is refused rather than written.
pub fn write_boosted_results(path: &Path, records: &[BoostedRecord]) -> Result<(), FormatError> {
    for (index, record) in records.iter().enumerate() {
        if !(record.score >= record.original_score) {
            return Err(FormatError::InvariantViolation(format!(
                "record {index} (track {}): boosted score {} is below the original {}",
                record.track_id, record.score, record.original_score
            )));
        }
    }
    let body = serde_json::to_string(records).expect("boosted records always serialize");
    fs::write(path, body).map_err(|e| FormatError::io(path, e))
}

/// One output image worth of ground truth for [`write_coco_groundtruth`].
#[derive(Debug, Clone)]
pub struct GroundTruthImage {
    pub file_name: String,
    pub size: FrameSize,
    pub boxes: Vec<BoundingBox>,
}

/// Writes a COCO annotation file from scratch (ids assigned 1..n in input
/// order, one category).
pub fn write_coco_groundtruth(
    path: &Path,
    images: &[GroundTruthImage],
    category_name: &str,
) -> Result<(), FormatError> {
    #[derive(Serialize)]
    struct OutImage<'a> {
        id: i64,
        width: u32,
        height: u32,
        file_name: &'a str,
    }
    #[derive(Serialize)]
    struct OutAnnotation {
        id: i64,
        image_id: i64,
        category_id: i64,
        bbox: [f64; 4],
        area: f64,
        iscrowd: u8,
    }
    #[derive(Serialize)]
    struct OutCategory<'a> {
        id: i64,
        name: &'a str,
    }
    #[derive(Serialize)]
    struct OutDataset<'a> {
        images: Vec<OutImage<'a>>,
        annotations: Vec<OutAnnotation>,
        categories: Vec<OutCategory<'a>>,
    }

    let mut out = OutDataset {
        images: Vec::with_capacity(images.len()),
        annotations: Vec::new(),
        categories: vec![OutCategory {
            id: 1,
            name: category_name,
        }],
    };
    let mut next_annotation = 1i64;
    for (index, image) in images.iter().enumerate() {
        let image_id = index as i64 + 1;
        out.images.push(OutImage {
            id: image_id,
            width: image.size.width(),
            height: image.size.height(),
            file_name: &image.file_name,
        });
        for bbox in &image.boxes {
            out.annotations.push(OutAnnotation {
                id: next_annotation,
                image_id,
                category_id: 1,
                bbox: bbox.to_xywh(),
                area: bbox.area(),
                iscrowd: 0,
            });
            next_annotation += 1;
        }
    }
    let body = serde_json::to_string_pretty(&out).expect("annotation file always serializes");
    fs::write(path, body).map_err(|e| FormatError::io(path, e))
}

/// `video_dir/000123.jpg` → video `"video_dir"`, frame `123`. Images at the
/// top level (no directory) get video id `""`. `None` when the stem isn't a
/// plain frame number (use a frame map for such datasets).
pub fn frame_key_from_file_name(file_name: &str) -> Option<FrameKey> {
    let (video_id, stem) = match file_name.rfind('/') {
        Some(pos) => (&file_name[..pos], &file_name[pos + 1..]),
        None => ("", file_name),
    };
    let stem = stem.rsplit_once('.').map(|(s, _)| s).unwrap_or(stem);
    if stem.is_empty() || !stem.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let frame_index: u64 = stem.parse().ok()?;
    Some(FrameKey::new(video_id, frame_index))
}

fn parse_json_file<T: DeserializeOwned>(path: &Path) -> Result<T, FormatError> {
    let text = fs::read_to_string(path).map_err(|e| FormatError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| FormatError::json(path, e))
}

fn parse_record<T: DeserializeOwned>(
    path: &Path,
    section: &'static str,
    index: usize,
    value: &Value,
) -> Result<T, FormatError> {
    serde_json::from_value(value.clone()).map_err(|e| FormatError::Record {
        path: path.to_path_buf(),
        section,
        index,
        message: e.to_string(),
    })
}

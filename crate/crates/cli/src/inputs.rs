//! Loading detector output into per-video sequences, from either supported
//! format.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::anyhow;

use trackboost_core::detection::DetectionSequence;
use trackboost_core::formats::coco::FrameMap;
use trackboost_core::formats::{
    read_coco_detections, read_coco_groundtruth, read_frame_map, read_mot_detections, CocoIndex,
    IoDiagnostics,
};
use trackboost_core::geometry::FrameSize;

use crate::error::{input, CliError};

/// Detections grouped per video, plus the index their image ids and
/// categories are looked up in.
pub struct LoadedDetections {
    pub sequences: BTreeMap<String, DetectionSequence>,
    pub index: CocoIndex,
    pub diagnostics: IoDiagnostics,
}

/// Parses a `WIDTHxHEIGHT` dimension string such as `1920x1080`.
pub fn parse_frame_size(text: &str) -> Result<FrameSize, CliError> {
    let parse = || -> Option<FrameSize> {
        let (w, h) = text.split_once(['x', 'X'])?;
        FrameSize::new(w.trim().parse().ok()?, h.trim().parse().ok()?).ok()
    };
    parse().ok_or_else(|| {
        input(anyhow!(
            "frame size must look like 1920x1080 with positive sides, got {text:?}"
        ))
    })
}

pub fn load_frame_map(path: Option<&Path>) -> Result<Option<FrameMap>, CliError> {
    path.map(|p| read_frame_map(p).map_err(input)).transpose()
}

/// Loads detections from a COCO results file (`.json`, read against its
/// annotation file) or a MOT CSV (`.csv`/`.txt`, which needs an explicit
/// frame size and covers a single video).
pub fn load_detections(
    detections: &Path,
    annotations: Option<&Path>,
    frame_map: Option<&Path>,
    frame_size: Option<&str>,
    video_id: Option<&str>,
) -> Result<LoadedDetections, CliError> {
    let extension = detections
        .extension()
        .and_then(|e| e.to_str())
        .map(str::to_ascii_lowercase)
        .unwrap_or_default();
    match extension.as_str() {
        "json" => {
            let annotations = annotations.ok_or_else(|| {
                input(anyhow!(
                    "COCO results input needs --annotations for image ids and frame sizes"
                ))
            })?;
            let map = load_frame_map(frame_map)?;
            let gt = read_coco_groundtruth(annotations, map.as_ref()).map_err(input)?;
            let parsed = read_coco_detections(detections, &gt.index).map_err(input)?;
            let mut diagnostics = gt.diagnostics;
            diagnostics.merge(parsed.diagnostics);
            Ok(LoadedDetections {
                sequences: parsed.sequences,
                index: gt.index,
                diagnostics,
            })
        }
        "csv" | "txt" => {
            let size_text = frame_size.ok_or_else(|| {
                input(anyhow!("MOT input needs --frame-size (e.g. 1920x1080)"))
            })?;
            let size = parse_frame_size(size_text)?;
            let video_id = video_id
                .map(str::to_owned)
                .or_else(|| {
                    detections
                        .file_stem()
                        .and_then(|s| s.to_str())
                        .map(str::to_owned)
                })
                .ok_or_else(|| input(anyhow!("cannot derive a video id; pass --video-id")))?;
            let (sequence, diagnostics) = read_mot_detections(detections, size).map_err(input)?;
            let index = CocoIndex::synthetic(
                &video_id,
                size,
                sequence.frames().iter().map(|f| f.frame_index),
            );
            let mut sequences = BTreeMap::new();
            sequences.insert(video_id, sequence);
            Ok(LoadedDetections {
                sequences,
                index,
                diagnostics,
            })
        }
        _ => Err(input(anyhow!(
            "cannot tell the detection format of {}: expected .json (COCO results) or .csv/.txt (MOT)",
            detections.display()
        ))),
    }
}

/// Prints input repairs to stderr so dropped or clamped records are never
/// silent.
pub fn report_diagnostics(diagnostics: &IoDiagnostics) {
    if let Some(summary) = diagnostics.summary() {
        eprintln!("input repairs: {summary}");
        for reason in &diagnostics.rejected {
            eprintln!("  rejected: {reason}");
        }
    }
}

//! MOT challenge CSV detections: `frame,id,x,y,w,h,conf,...`, one row per
//! detection, frames 1-based in the file and 0-based in memory.

use std::fs;
use std::path::Path;

use crate::detection::{Detection, DetectionSequence, SequenceFrame, DEFAULT_CLASS};
use crate::geometry::{BoundingBox, FrameSize};

use super::{FormatError, IoDiagnostics};

/// Reads MOT CSV detections. The format carries no frame geometry, so the
/// frame size must be supplied; it gates association distances downstream.
///
/// Only frames with at least one row are materialized (an empty frame is
/// not representable in this format). Rows keep file order within a frame.
pub fn read_mot_detections(
    path: &Path,
    frame_size: FrameSize,
) -> Result<(DetectionSequence, IoDiagnostics), FormatError> {
    let text = fs::read_to_string(path).map_err(|e| FormatError::io(path, e))?;
    let mut diagnostics = IoDiagnostics::default();

    let mut frames: std::collections::BTreeMap<u64, Vec<Detection>> = Default::default();
    for (line_number, line) in text.lines().enumerate() {
        let line_number = line_number + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() < 7 {
            return Err(FormatError::MotLine {
                path: path.to_path_buf(),
                line: line_number,
                message: format!("expected at least 7 comma-separated fields, got {}", fields.len()),
            });
        }
        let parse_f64 = |field: usize, name: &str| -> Result<f64, FormatError> {
            let value: f64 = fields[field].parse().map_err(|_| FormatError::MotLine {
                path: path.to_path_buf(),
                line: line_number,
                message: format!("cannot parse {name} {:?}", fields[field]),
            })?;
            if !value.is_finite() {
                return Err(FormatError::MotLine {
                    path: path.to_path_buf(),
                    line: line_number,
                    message: format!("{name} must be finite"),
                });
            }
            Ok(value)
        };

        let file_frame: u64 = fields[0].parse().map_err(|_| FormatError::MotLine {
            path: path.to_path_buf(),
            line: line_number,
            message: format!("cannot parse frame number {:?}", fields[0]),
        })?;
        if file_frame == 0 {
            return Err(FormatError::MotLine {
                path: path.to_path_buf(),
                line: line_number,
                message: "frame numbers are 1-based".into(),
            });
        }
        let frame_index = file_frame - 1;

        let x = parse_f64(2, "x")?;
        let y = parse_f64(3, "y")?;
        let w = parse_f64(4, "w")?;
        let h = parse_f64(5, "h")?;
        let raw_conf = parse_f64(6, "conf")?;
        let conf = raw_conf.clamp(0.0, 1.0);
        if conf != raw_conf {
            diagnostics.clamped_scores += 1;
        }

        let bbox = match BoundingBox::from_xywh(x, y, w, h) {
            Ok(b) => b,
            Err(_) => {
                diagnostics.rejected.push(format!(
                    "line {line_number} (frame {frame_index}): degenerate bbox [{x}, {y}, {w}, {h}] dropped"
                ));
                continue;
            }
        };
        let (bbox, moved) = match bbox.clamp_to(frame_size) {
            Ok(pair) => pair,
            Err(_) => {
                diagnostics.rejected.push(format!(
                    "line {line_number} (frame {frame_index}): bbox lies entirely outside the frame, dropped"
                ));
                continue;
            }
        };
        if moved {
            diagnostics.clamped_boxes += 1;
        }
        frames.entry(frame_index).or_default().push(
            Detection::new(frame_index, bbox, conf, DEFAULT_CLASS)
                .expect("confidence clamped above"),
        );
    }

    let sequence_frames: Vec<SequenceFrame> = frames
        .into_iter()
        .map(|(frame_index, detections)| SequenceFrame {
            frame_index,
            detections,
        })
        .collect();
    let sequence = DetectionSequence::new(frame_size, sequence_frames)
        .expect("BTreeMap keys are sorted and boxes were clamped");
    Ok((sequence, diagnostics))
}

/// Writes detections as MOT CSV rows (`id` is `-1`: these are raw
/// detections, not tracks; world coordinates are `-1` placeholders).
///
/// Numbers use the shortest representation that round-trips, so
/// write-then-read reproduces the sequence exactly — minus empty frames,
/// which this format cannot express.
pub fn write_mot_detections(path: &Path, sequence: &DetectionSequence) -> Result<(), FormatError> {
    let mut out = String::new();
    for frame in sequence.frames() {
        for det in &frame.detections {
            let [x, y, w, h] = det.bbox.to_xywh();
            out.push_str(&format!(
                "{},-1,{},{},{},{},{},-1,-1,-1\n",
                frame.frame_index + 1,
                x,
                y,
                w,
                h,
                det.confidence
            ));
        }
    }
    fs::write(path, out).map_err(|e| FormatError::io(path, e))
}

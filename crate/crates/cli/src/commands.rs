//! One function per subcommand. Flags override config-file values, which
//! override defaults.

use std::collections::BTreeSet;
use std::fs;

use anyhow::{anyhow, Context};
use serde::Deserialize;
use serde_json::Value;

use trackboost_core::boost::BoostMode;
use trackboost_core::detection::FrameKey;
use trackboost_core::eval::{evaluate, EvalDetection};
use trackboost_core::formats::{
    frame_key_from_file_name, read_coco_detections, read_coco_groundtruth, read_tracked,
    uniform_sample_indices, write_boosted_results, write_tracked, TrackedFile,
};
use trackboost_synth::{generate_dataset, SynthConfig};

use crate::config::{require_path, PathDefaults, PipelineConfig};
use crate::error::{from_write, input, CliError};
use crate::inputs::{load_detections, load_frame_map, report_diagnostics, LoadedDetections};
use crate::pipeline::{boost_records, track_videos};
use crate::{BoostArgs, EvalArgs, PipelineArgs, SampleArgs, SynthArgs, TrackArgs};

fn load_tracking_input(
    args: &TrackArgs,
    config: &PipelineConfig,
) -> Result<LoadedDetections, CliError> {
    let detections = require_path(
        args.detections.clone(),
        config.paths.detections.as_ref(),
        "--detections",
    )?;
    let annotations = args
        .annotations
        .clone()
        .or_else(|| config.paths.annotations.clone());
    let loaded = load_detections(
        &detections,
        annotations.as_deref(),
        args.frame_map.as_deref(),
        args.frame_size.as_deref(),
        args.video_id.as_deref(),
    )?;
    report_diagnostics(&loaded.diagnostics);
    Ok(loaded)
}

fn tracking_summary(file: &TrackedFile, input_detections: usize) -> String {
    let emitted: usize = file.videos.iter().map(|v| v.records.len()).sum();
    let tracks: usize = file.videos.iter().map(|v| v.tracks.len()).sum();
    format!(
        "tracked {} video(s): {emitted} of {input_detections} detection(s) attributed to {tracks} track(s)",
        file.videos.len()
    )
}

pub fn track(args: TrackArgs) -> Result<(), CliError> {
    let config = PipelineConfig::load(args.config.as_deref())?;
    let output = require_path(args.output.clone(), config.paths.output.as_ref(), "--output")?;
    let loaded = load_tracking_input(&args, &config)?;
    let input_detections = loaded.sequences.values().map(|s| s.num_detections()).sum();

    let file = track_videos(&loaded.sequences, &loaded.index, &config.tracker)?;
    write_tracked(&output, &file).map_err(from_write)?;
    println!("{}", tracking_summary(&file, input_detections));
    println!("wrote {}", output.display());
    Ok(())
}

pub fn boost(args: BoostArgs) -> Result<(), CliError> {
    let config = PipelineConfig::load(args.config.as_deref())?;
    let mode = args.mode.map(BoostMode::from).unwrap_or(config.boost_mode);
    let output = require_path(args.output.clone(), config.paths.output.as_ref(), "--output")?;

    let file = read_tracked(&args.input).map_err(input)?;
    let records = boost_records(&file, mode)?;
    write_boosted_results(&output, &records).map_err(from_write)?;
    println!(
        "boosted {} record(s) across {} video(s) in {} mode",
        records.len(),
        file.videos.len(),
        mode_name(mode)
    );
    println!("wrote {}", output.display());
    Ok(())
}

pub fn pipeline(args: PipelineArgs) -> Result<(), CliError> {
    let config = PipelineConfig::load(args.track.config.as_deref())?;
    let mode = args.mode.map(BoostMode::from).unwrap_or(config.boost_mode);
    let output = require_path(
        args.track.output.clone(),
        config.paths.output.as_ref(),
        "--output",
    )?;
    let loaded = load_tracking_input(&args.track, &config)?;
    let input_detections = loaded.sequences.values().map(|s| s.num_detections()).sum();

    let file = track_videos(&loaded.sequences, &loaded.index, &config.tracker)?;
    if let Some(tracked_output) = &args.tracked_output {
        write_tracked(tracked_output, &file).map_err(from_write)?;
    }
    let records = boost_records(&file, mode)?;
    write_boosted_results(&output, &records).map_err(from_write)?;
    println!("{}", tracking_summary(&file, input_detections));
    println!(
        "boosted {} record(s) in {} mode",
        records.len(),
        mode_name(mode)
    );
    println!("wrote {}", output.display());
    Ok(())
}

pub fn eval(args: EvalArgs) -> Result<(), CliError> {
    let config = PipelineConfig::load(args.config.as_deref())?;
    let iou_threshold = args.iou_threshold.unwrap_or(config.eval.iou_threshold);
    let annotations = require_path(
        args.annotations.clone(),
        config.paths.annotations.as_ref(),
        "--annotations",
    )?;
    let detections = require_path(
        args.detections.clone(),
        config.paths.detections.as_ref(),
        "--detections",
    )?;

    let map = load_frame_map(args.frame_map.as_deref())?;
    let gt = read_coco_groundtruth(&annotations, map.as_ref()).map_err(input)?;
    let parsed = read_coco_detections(&detections, &gt.index).map_err(input)?;
    let mut diagnostics = gt.diagnostics;
    diagnostics.merge(parsed.diagnostics);
    report_diagnostics(&diagnostics);

    let mut eval_detections = Vec::new();
    for (video_id, sequence) in &parsed.sequences {
        for frame in sequence.frames() {
            for det in &frame.detections {
                eval_detections.push(EvalDetection {
                    frame: FrameKey::new(video_id.clone(), det.frame_index),
                    bbox: det.bbox,
                    confidence: det.confidence,
                });
            }
        }
    }
    let evaluation = evaluate(&eval_detections, &gt.ground_truth, iou_threshold).map_err(input)?;
    if !evaluation.ignored_frames.is_empty() {
        eprintln!(
            "{} frame(s) carried detections but no ground-truth entry; their detections were ignored",
            evaluation.ignored_frames.len()
        );
    }
    print!("{}", evaluation.report.to_text());
    if let Some(report_path) = &args.output {
        let body = serde_json::to_string_pretty(&evaluation)
            .context("serializing the evaluation report")
            .map_err(input)?;
        fs::write(report_path, body + "\n")
            .with_context(|| format!("writing {}", report_path.display()))
            .map_err(input)?;
    }
    Ok(())
}

pub fn synth(args: SynthArgs) -> Result<(), CliError> {
    let text = fs::read_to_string(&args.config)
        .with_context(|| format!("reading config {}", args.config.display()))
        .map_err(input)?;
    // The file may be a whole pipeline config or a bare synth config.
    let (mut synth_config, paths): (SynthConfig, PathDefaults) =
        match serde_json::from_str::<PipelineConfig>(&text) {
            Ok(pipeline) => {
                let synth = pipeline.synth.ok_or_else(|| {
                    input(anyhow!(
                        "{} has no `synth` section",
                        args.config.display()
                    ))
                })?;
                (synth, pipeline.paths)
            }
            Err(pipeline_err) => match serde_json::from_str::<SynthConfig>(&text) {
                Ok(synth) => (synth, PathDefaults::default()),
                Err(synth_err) => {
                    return Err(input(anyhow!(
                        "{} parses neither as a pipeline config ({pipeline_err}) nor as a synth config ({synth_err})",
                        args.config.display()
                    )))
                }
            },
        };
    if let Some(seed) = args.seed {
        synth_config.rng_seed = seed;
    }
    let output_dir = require_path(
        args.output_dir.clone(),
        paths.output_dir.as_ref(),
        "--output-dir",
    )?;
    let summary = generate_dataset(&synth_config, &output_dir).map_err(input)?;
    println!(
        "wrote {} sample(s) to {} ({} placement redraw(s))",
        summary.samples_written,
        summary.output_dir.display(),
        summary.rejected_placements
    );
    Ok(())
}

pub fn sample(args: SampleArgs) -> Result<(), CliError> {
    let text = fs::read_to_string(&args.input)
        .with_context(|| format!("reading {}", args.input.display()))
        .map_err(input)?;
    let mut doc: Value = serde_json::from_str(&text)
        .with_context(|| format!("parsing {}", args.input.display()))
        .map_err(input)?;
    let map = load_frame_map(args.frame_map.as_deref())?;

    #[derive(Deserialize)]
    struct RawImage {
        id: i64,
        #[serde(default)]
        file_name: String,
    }

    let images = doc
        .get("images")
        .and_then(Value::as_array)
        .ok_or_else(|| input(anyhow!("{} has no `images` array", args.input.display())))?;
    let mut keyed: Vec<(FrameKey, i64)> = Vec::with_capacity(images.len());
    for (idx, image) in images.iter().enumerate() {
        let raw: RawImage = serde_json::from_value(image.clone())
            .with_context(|| format!("images[{idx}] in {}", args.input.display()))
            .map_err(input)?;
        let key = match &map {
            Some(map) => map.lookup(raw.id).cloned(),
            None => frame_key_from_file_name(&raw.file_name),
        }
        .ok_or_else(|| {
            input(anyhow!(
                "images[{idx}]: cannot derive video/frame from {:?}; provide --frame-map",
                raw.file_name
            ))
        })?;
        keyed.push((key, raw.id));
    }
    // Evenly spaced over playback order, not file order.
    keyed.sort_by(|a, b| a.0.cmp(&b.0));
    let kept_rows = uniform_sample_indices(keyed.len(), args.count).map_err(input)?;
    let kept_ids: BTreeSet<i64> = kept_rows.iter().map(|&row| keyed[row].1).collect();

    let total = keyed.len();
    let images = doc
        .get_mut("images")
        .and_then(Value::as_array_mut)
        .expect("checked above");
    images.retain(|image| {
        image
            .get("id")
            .and_then(Value::as_i64)
            .is_some_and(|id| kept_ids.contains(&id))
    });
    if let Some(annotations) = doc.get_mut("annotations").and_then(Value::as_array_mut) {
        annotations.retain(|ann| {
            ann.get("image_id")
                .and_then(Value::as_i64)
                .is_some_and(|id| kept_ids.contains(&id))
        });
    }

    let body = serde_json::to_string_pretty(&doc)
        .context("serializing the sampled annotation file")
        .map_err(input)?;
    fs::write(&args.output, body + "\n")
        .with_context(|| format!("writing {}", args.output.display()))
        .map_err(input)?;
    println!("kept {} of {total} frame(s)", kept_rows.len());
    println!("wrote {}", args.output.display());
    Ok(())
}

fn mode_name(mode: BoostMode) -> &'static str {
    match mode {
        BoostMode::Offline => "offline",
        BoostMode::Causal => "causal",
    }
}

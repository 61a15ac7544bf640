//! `trackboost` — post-processing for single-class video object detection:
//! tracking, track-based confidence boosting, AP evaluation, synthetic data
//! generation, and uniform frame sampling.
//!
//! Exit codes: 0 success, 1 bad input or usage, 2 internal self-check
//! failure. Given identical inputs, configuration, and seed, every
//! subcommand writes byte-identical output.

mod commands;
mod config;
mod error;
mod inputs;
mod pipeline;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use trackboost_core::boost::BoostMode;

#[derive(Parser)]
#[command(
    name = "trackboost",
    version,
    about = "Tracking, confidence boosting, and evaluation for video object detections"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Associate per-frame detections into tracks
    Track(TrackArgs),
    /// Rescore a tracked file by averaging each score with its track's maximum
    Boost(BoostArgs),
    /// Track and boost in one pass
    Pipeline(PipelineArgs),
    /// Average precision of detection results against ground truth
    Eval(EvalArgs),
    /// Render a synthetic sprite-on-background detection dataset
    Synth(SynthArgs),
    /// Keep an evenly spaced subset of an annotation file's frames
    Sample(SampleArgs),
}

/// `--mode` values, mapped onto [`BoostMode`].
#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    /// Whole-track maximum (post-processing)
    Offline,
    /// Running maximum (streaming-safe)
    Causal,
}

impl From<ModeArg> for BoostMode {
    fn from(mode: ModeArg) -> Self {
        match mode {
            ModeArg::Offline => BoostMode::Offline,
            ModeArg::Causal => BoostMode::Causal,
        }
    }
}

#[derive(Args)]
struct TrackArgs {
    /// Detections: COCO results .json, or MOT .csv/.txt
    #[arg(long)]
    detections: Option<PathBuf>,
    /// COCO annotation file (required with .json detections)
    #[arg(long)]
    annotations: Option<PathBuf>,
    /// image_id → video/frame map for datasets whose file names don't encode it
    #[arg(long)]
    frame_map: Option<PathBuf>,
    /// Frame size for MOT input, e.g. 1920x1080
    #[arg(long)]
    frame_size: Option<String>,
    /// Video id for MOT input (default: the input file stem)
    #[arg(long)]
    video_id: Option<String>,
    /// Pipeline config JSON
    #[arg(long)]
    config: Option<PathBuf>,
    /// Tracked output file
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct BoostArgs {
    /// Tracked file produced by `track`
    #[arg(long)]
    input: PathBuf,
    /// Which maximum to average with (default: config, then offline)
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    /// Pipeline config JSON
    #[arg(long)]
    config: Option<PathBuf>,
    /// Boosted results output file
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct PipelineArgs {
    #[command(flatten)]
    track: TrackArgs,
    /// Which maximum to average with (default: config, then offline)
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    /// Also write the intermediate tracked file here
    #[arg(long)]
    tracked_output: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    /// COCO results .json (raw or boosted)
    #[arg(long)]
    detections: Option<PathBuf>,
    /// COCO annotation file with the ground truth
    #[arg(long)]
    annotations: Option<PathBuf>,
    /// image_id → video/frame map
    #[arg(long)]
    frame_map: Option<PathBuf>,
    /// Matching threshold in (0, 1] (default: config, then 0.5)
    #[arg(long)]
    iou_threshold: Option<f64>,
    /// Pipeline config JSON
    #[arg(long)]
    config: Option<PathBuf>,
    /// Also write the full report as JSON here
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SynthArgs {
    /// Pipeline config with a `synth` section, or a bare synth config
    #[arg(long)]
    config: PathBuf,
    /// Dataset output directory
    #[arg(long)]
    output_dir: Option<PathBuf>,
    /// Overrides the config's rng_seed
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct SampleArgs {
    /// COCO annotation file to sample from
    #[arg(long)]
    input: PathBuf,
    /// Number of frames to keep
    #[arg(long, short = 'k')]
    count: usize,
    /// image_id → video/frame map
    #[arg(long)]
    frame_map: Option<PathBuf>,
    /// Sampled annotation output file
    #[arg(long)]
    output: PathBuf,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // Usage and parse errors land on stderr and exit 1; --help and
            // --version land on stdout and exit 0.
            let code = i32::from(err.use_stderr());
            let _ = err.print();
            std::process::exit(code);
        }
    };
    let result = match cli.command {
        Command::Track(args) => commands::track(args),
        Command::Boost(args) => commands::boost(args),
        Command::Pipeline(args) => commands::pipeline(args),
        Command::Eval(args) => commands::eval(args),
        Command::Synth(args) => commands::synth(args),
        Command::Sample(args) => commands::sample(args),
    };
    if let Err(err) = result {
        eprintln!("error: {err}");
        std::process::exit(err.exit_code());
    }
}

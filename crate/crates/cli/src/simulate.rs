//! `bearguard simulate`: scenario in, four artifacts out.

use std::fs;
use std::path::{Path, PathBuf};

use bearguard_core::config::Config;
use bearguard_core::eventlog::write_event_log;
use bearguard_core::metrics::{DetectionCounts, MetricsReport, SegmentCounts};
use bearguard_core::model::ObjectClass;
use bearguard_core::sim::{run_pipeline, EventCounts, PipelineOutput, Scenario};
use clap::Args;
use serde::Serialize;
use std::collections::BTreeMap;
use std::io::Write;

use crate::output::{self, pretty_json};
use crate::CliError;

pub const EVENTS_FILE: &str = "events.jsonl";
pub const SEGMENTS_FILE: &str = "segments.csv";
pub const METRICS_FILE: &str = "metrics.json";
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    /// Scenario JSON.
    #[arg(long)]
    pub scenario: PathBuf,
    /// Main config JSON; sections not given keep their defaults.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Detector seed; overrides the one in the scenario.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory, created if absent.
    #[arg(long)]
    pub out: PathBuf,
    /// Overwrite existing outputs.
    #[arg(long)]
    pub force: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CommandKind {
    Simulate,
    Evaluate,
    Power,
    Replay,
}

/// What was run, with which inputs. Holds nothing time-dependent so reruns
/// produce the same bytes.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: CommandKind,
    pub version: &'static str,
    pub scenario_path: PathBuf,
    pub config_path: Option<PathBuf>,
    pub seed: u64,
    pub output_dir: PathBuf,
    pub files: Vec<&'static str>,
}

#[derive(Debug, Serialize)]
struct SegmentRow {
    segment_index: usize,
    start_frame: u64,
    end_time: f64,
    decision: &'static str,
    max_bear_confidence: f64,
    human_present: bool,
}

#[derive(Debug, Serialize)]
struct MetricsFile<'a> {
    /// `null` when nothing entered the field of view.
    metrics: Option<&'a MetricsReport>,
    per_class_ap: Option<&'a BTreeMap<ObjectClass, f64>>,
    detections: Option<DetectionCounts>,
    segments: Option<SegmentCounts>,
    video_recall: Option<f64>,
    counts: EventCounts,
}

pub(crate) fn load_config(path: Option<&Path>) -> Result<Config, CliError> {
    let Some(path) = path else {
        return Ok(Config::default());
    };
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    Config::from_json(&text).map_err(|e| CliError::reading(path, e))
}

pub(crate) fn load_scenario(path: &Path) -> Result<Scenario, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Input(format!("{}: line {}: {e}", path.display(), e.line())))
}

fn segments_csv(out: &PipelineOutput, humans: &[bool]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for (i, (seg, human)) in out.segments.iter().zip(humans).enumerate() {
        w.serialize(SegmentRow {
            segment_index: i,
            start_frame: seg.start_index(),
            end_time: seg.end_time(),
            decision: if seg.is_bear() {
                "BearDetected"
            } else {
                "NoBear"
            },
            max_bear_confidence: seg.max_bear_confidence(),
            human_present: *human,
        })
        .map_err(|e| CliError::Input(e.to_string()))?;
    }
    w.into_inner().map_err(|e| CliError::Input(e.to_string()))
}

pub fn cmd_simulate(args: &SimulateArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let config = load_config(args.config.as_deref())?;
    let mut scenario = load_scenario(&args.scenario)?;
    if let Some(seed) = args.seed {
        scenario.detector.seed = seed;
    }
    if let Some(camera) = config.camera {
        scenario.camera = camera;
    }
    config.validate().map_err(CliError::domain)?;

    let paths = output::prepare(
        &args.out,
        &[EVENTS_FILE, SEGMENTS_FILE, METRICS_FILE, MANIFEST_FILE],
        args.force,
    )?;

    let result = run_pipeline(&scenario, &config.filter, &config.controller)
        .map_err(|e| CliError::Domain(format!("{}: {e}", args.scenario.display())))?;

    let mut events = Vec::new();
    write_event_log(&result.events, &mut events).map_err(CliError::domain)?;

    let humans: Vec<bool> = result
        .segments
        .iter()
        .map(|s| config.controller.human_in(s))
        .collect();
    let segments = segments_csv(&result, &humans)?;

    let eval = result.evaluation.as_ref();
    let metrics = MetricsFile {
        metrics: eval.map(|e| &e.report),
        per_class_ap: eval.map(|e| &e.per_class_ap),
        detections: eval.map(|e| e.detections),
        segments: eval.map(|e| e.segments),
        video_recall: eval.and_then(|e| e.segments.video_recall()),
        counts: result.counts,
    };

    let manifest = RunManifest {
        command: CommandKind::Simulate,
        version: env!("CARGO_PKG_VERSION"),
        scenario_path: args.scenario.clone(),
        config_path: args.config.clone(),
        seed: scenario.detector.seed,
        output_dir: args.out.clone(),
        files: vec![EVENTS_FILE, SEGMENTS_FILE, METRICS_FILE],
    };

    output::write(&paths[0], &events)?;
    output::write(&paths[1], &segments)?;
    output::write(&paths[2], &pretty_json(&metrics))?;
    output::write(&paths[3], &pretty_json(&manifest))?;

    let c = result.counts;
    let _ = writeln!(
        out,
        "segments: {} (bear {}), sprays: {}, inhibits: {}",
        c.segments, c.bear_segments, c.sprays, c.inhibits
    );
    let _ = writeln!(out, "wrote {}", args.out.display());
    Ok(())
}

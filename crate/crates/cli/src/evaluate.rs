//! `bearguard evaluate`: score a predictions CSV against ground truth.

use std::collections::BTreeSet;
use std::fs::File;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use bearguard_core::annotations::{read_annotations, FrameDetections};
use bearguard_core::metrics::{evaluate_dataset, EvalConfig, Evaluation};
use bearguard_core::model::ObjectClass;
use bearguard_core::Error;
use clap::Args;

use crate::simulate::load_config;
use crate::CliError;

#[derive(Debug, Clone, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub predictions: PathBuf,
    #[arg(long = "ground-truth")]
    pub ground_truth: PathBuf,
    /// Minimum IoU for a match. Defaults to 0.5.
    #[arg(long = "iou-threshold")]
    pub iou_threshold: Option<f64>,
    /// Main config; its filter section sets segment length and bear
    /// threshold for the segment-level rates.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

pub fn read_csv(path: &Path) -> Result<Vec<FrameDetections>, CliError> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    read_annotations(BufReader::new(file)).map_err(|e| CliError::reading(path, e))
}

fn classes(frames: &[FrameDetections]) -> BTreeSet<ObjectClass> {
    frames
        .iter()
        .flat_map(|(_, d)| d.iter().map(|d| d.class()))
        .collect()
}

/// Runs the evaluation without printing.
pub fn evaluate_files(args: &EvaluateArgs) -> Result<Evaluation, CliError> {
    let config = load_config(args.config.as_deref())?;
    let preds = read_csv(&args.predictions)?;
    let gts = read_csv(&args.ground_truth)?;

    let pred_classes = classes(&preds);
    let gt_classes = classes(&gts);
    if gt_classes.is_empty() {
        return Err(CliError::Domain(format!(
            "{}: ground truth is empty",
            args.ground_truth.display()
        )));
    }
    if !pred_classes.is_empty() && pred_classes.is_disjoint(&gt_classes) {
        let list =
            |s: &BTreeSet<ObjectClass>| s.iter().map(|c| c.as_str()).collect::<Vec<_>>().join(", ");
        return Err(CliError::Domain(format!(
            "class mismatch: predictions have [{}], ground truth has [{}]",
            list(&pred_classes),
            list(&gt_classes)
        )));
    }

    let cfg = EvalConfig {
        iou_threshold: args
            .iou_threshold
            .unwrap_or(EvalConfig::default().iou_threshold),
        segment_length: config.filter.segment_length,
        bear_threshold: config.filter.bear_threshold,
    };
    evaluate_dataset(&preds, &gts, &cfg).map_err(|e| match e {
        Error::NoGroundTruth => CliError::Domain("ground truth is empty".into()),
        e => CliError::domain(e),
    })
}

pub fn cmd_evaluate(args: &EvaluateArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let eval = evaluate_files(args)?;
    let json = serde_json::to_string_pretty(&eval.report).expect("serializable");
    let _ = writeln!(out, "{json}");
    Ok(())
}

//! Detection and video-level evaluation.
//!
//! Conventions: IoU matching at 0.5 by default, all-point interpolated AP
//! (area under the right-to-left running-max precision envelope), mAP as the
//! unweighted mean over classes that have ground truth. The false-positive
//! rate and per-class misidentification rates are measured on segments, not
//! frames: a segment is a negative when its ground truth holds no bear.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::annotations::FrameDetections;
use crate::error::{Error, Result};
use crate::model::{BoundingBox, Detection, ObjectClass, SegmentDecision};

pub const DEFAULT_IOU_THRESHOLD: f64 = 0.5;

pub fn iou(a: &BoundingBox, b: &BoundingBox) -> f64 {
    // (x + w) - x need not round back to w
    if a == b {
        return 1.0;
    }
    let iw = (a.right().min(b.right()) - a.x().max(b.x())).max(0.0);
    let ih = (a.bottom().min(b.bottom()) - a.y().max(b.y())).max(0.0);
    let inter = iw * ih;
    if inter == 0.0 {
        return 0.0;
    }
    let union = a.area() + b.area() - inter;
    (inter / union).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MatchedPair {
    pub prediction: usize,
    pub ground_truth: usize,
    pub iou: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct MatchResult {
    pub true_positives: usize,
    pub false_positives: usize,
    pub false_negatives: usize,
    pub matched_pairs: Vec<MatchedPair>,
}

impl MatchResult {
    /// Whether prediction `index` was matched.
    pub fn is_matched(&self, index: usize) -> bool {
        self.matched_pairs.iter().any(|m| m.prediction == index)
    }
}

/// Indices of `preds` in visiting order: descending confidence, ties by
/// ascending index.
pub fn confidence_order(preds: &[Detection]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..preds.len()).collect();
    order.sort_by(|&a, &b| {
        preds[b]
            .confidence()
            .total_cmp(&preds[a].confidence())
            .then(a.cmp(&b))
    });
    order
}

fn check_threshold(iou_threshold: f64) -> Result<()> {
    if !(iou_threshold > 0.0 && iou_threshold <= 1.0) {
        return Err(Error::Metrics(format!(
            "iou threshold {iou_threshold} outside (0, 1]"
        )));
    }
    Ok(())
}

/// Greedy one-to-one matching of same-class predictions to ground truth.
///
/// Each prediction, in [`confidence_order`], takes the unmatched ground truth
/// with the highest IoU at or above `iou_threshold` (lowest index on ties).
pub fn match_greedy(
    preds: &[Detection],
    gts: &[Detection],
    iou_threshold: f64,
) -> Result<MatchResult> {
    check_threshold(iou_threshold)?;
    if let Some(first) = preds.first().or(gts.first()) {
        let class = first.class();
        if preds.iter().chain(gts).any(|d| d.class() != class) {
            return Err(Error::Metrics(
                "match_greedy needs predictions and ground truth of one class".into(),
            ));
        }
    }

    let mut taken = vec![false; gts.len()];
    let mut pairs = Vec::new();
    for p in confidence_order(preds) {
        let mut best: Option<(usize, f64)> = None;
        for (g, gt) in gts.iter().enumerate() {
            if taken[g] {
                continue;
            }
            let overlap = iou(preds[p].bbox(), gt.bbox());
            if overlap >= iou_threshold && best.is_none_or(|(_, b)| overlap > b) {
                best = Some((g, overlap));
            }
        }
        if let Some((g, overlap)) = best {
            taken[g] = true;
            pairs.push(MatchedPair {
                prediction: p,
                ground_truth: g,
                iou: overlap,
            });
        }
    }

    let tp = pairs.len();
    Ok(MatchResult {
        true_positives: tp,
        false_positives: preds.len() - tp,
        false_negatives: gts.len() - tp,
        matched_pairs: pairs,
    })
}

/// All-point interpolated average precision of a ranked list.
///
/// `ranked` holds `(confidence, is_true_positive)` sorted by descending
/// confidence.
pub fn average_precision(ranked: &[(f64, bool)], total_gt: usize) -> Result<f64> {
    if total_gt == 0 {
        return Err(Error::NoGroundTruth);
    }
    if ranked.windows(2).any(|w| w[1].0 > w[0].0) {
        return Err(Error::Metrics(
            "ranked list must be sorted by descending confidence".into(),
        ));
    }
    let tp_total = ranked.iter().filter(|r| r.1).count();
    if tp_total > total_gt {
        return Err(Error::Metrics(format!(
            "{tp_total} true positives exceed {total_gt} ground-truth objects"
        )));
    }

    let mut precision = Vec::with_capacity(ranked.len());
    let mut recall = Vec::with_capacity(ranked.len());
    let mut tp = 0usize;
    for (k, &(_, is_tp)) in ranked.iter().enumerate() {
        if is_tp {
            tp += 1;
        }
        precision.push(tp as f64 / (k + 1) as f64);
        recall.push(tp as f64 / total_gt as f64);
    }
    for k in (0..precision.len().saturating_sub(1)).rev() {
        precision[k] = precision[k].max(precision[k + 1]);
    }

    let mut ap = 0.0;
    let mut prev_recall = 0.0;
    for (p, r) in precision.iter().zip(&recall) {
        ap += (r - prev_recall) * p;
        prev_recall = *r;
    }
    Ok(ap)
}

pub fn mean_average_precision(per_class_ap: &BTreeMap<ObjectClass, f64>) -> Result<f64> {
    if per_class_ap.is_empty() {
        return Err(Error::Metrics("mAP over an empty class set".into()));
    }
    Ok(per_class_ap.values().sum::<f64>() / per_class_ap.len() as f64)
}

pub fn f1_score(precision: f64, recall: f64) -> f64 {
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

pub fn false_positive_rate(fp: u64, tn: u64) -> Result<f64> {
    if fp + tn == 0 {
        return Err(Error::Metrics(
            "false positive rate with no negatives".into(),
        ));
    }
    Ok(fp as f64 / (fp + tn) as f64)
}

/// Fraction of each non-bear class's segments that were classified as bear.
/// Classes without segments are left out of the map.
pub fn video_misclassification_rate(
    segments: &[(ObjectClass, SegmentDecision)],
) -> BTreeMap<ObjectClass, f64> {
    let mut counts: BTreeMap<ObjectClass, (u64, u64)> = BTreeMap::new();
    for &(class, decision) in segments {
        if class == ObjectClass::Bear {
            continue;
        }
        let entry = counts.entry(class).or_default();
        entry.1 += 1;
        if decision == SegmentDecision::BearDetected {
            entry.0 += 1;
        }
    }
    counts
        .into_iter()
        .map(|(c, (bear, total))| (c, bear as f64 / total as f64))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub map_value: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub fpr: f64,
    pub per_class_video_misid: BTreeMap<ObjectClass, f64>,
}

impl MetricsReport {
    pub fn new(
        map_value: f64,
        precision: f64,
        recall: f64,
        fpr: f64,
        per_class_video_misid: BTreeMap<ObjectClass, f64>,
    ) -> Result<Self> {
        let report = MetricsReport {
            map_value,
            precision,
            recall,
            f1: f1_score(precision, recall),
            fpr,
            per_class_video_misid,
        };
        report.validate()?;
        Ok(report)
    }

    pub fn validate(&self) -> Result<()> {
        let unit = |name: &str, v: f64| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(Error::Metrics(format!("{name} = {v} outside [0, 1]")))
            }
        };
        unit("map", self.map_value)?;
        unit("precision", self.precision)?;
        unit("recall", self.recall)?;
        unit("f1", self.f1)?;
        unit("fpr", self.fpr)?;
        for (c, v) in &self.per_class_video_misid {
            unit(c.as_str(), *v)?;
        }
        let expected = f1_score(self.precision, self.recall);
        if (expected - self.f1).abs() > 1e-12 {
            return Err(Error::Metrics(format!(
                "f1 {} is not the harmonic mean of precision and recall ({expected})",
                self.f1
            )));
        }
        Ok(())
    }
}

/// Settings for whole-dataset evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EvalConfig {
    pub iou_threshold: f64,
    pub segment_length: usize,
    pub bear_threshold: f64,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            iou_threshold: DEFAULT_IOU_THRESHOLD,
            segment_length: 10,
            bear_threshold: 0.70,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct DetectionCounts {
    pub true_positives: usize,
    pub false_positives: usize,
    pub false_negatives: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct SegmentCounts {
    pub bear_segments: u64,
    pub bear_segments_detected: u64,
    pub negative_segments: u64,
    pub negative_segments_flagged: u64,
}

impl SegmentCounts {
    /// Fraction of bear segments classified as bear, `None` without any.
    pub fn video_recall(&self) -> Option<f64> {
        (self.bear_segments > 0)
            .then(|| self.bear_segments_detected as f64 / self.bear_segments as f64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Evaluation {
    pub report: MetricsReport,
    pub per_class_ap: BTreeMap<ObjectClass, f64>,
    pub detections: DetectionCounts,
    pub segments: SegmentCounts,
}

fn of_class(dets: &[Detection], class: ObjectClass) -> Vec<Detection> {
    dets.iter()
        .copied()
        .filter(|d| d.class() == class)
        .collect()
}

/// Evaluates frame-indexed predictions against ground truth.
///
/// Detection metrics (mAP, precision, recall) match per frame and class.
/// Segment metrics group frames into tumbling windows of
/// `cfg.segment_length` by frame index: a window is flagged when any Bear
/// prediction reaches `cfg.bear_threshold`, and is a negative when its ground
/// truth holds no Bear. FPR is 0 when there are no negative windows.
pub fn evaluate_dataset(
    preds: &[FrameDetections],
    gts: &[FrameDetections],
    cfg: &EvalConfig,
) -> Result<Evaluation> {
    check_threshold(cfg.iou_threshold)?;
    if cfg.segment_length == 0 {
        return Err(Error::Config("segment_length must be at least 1".into()));
    }
    let pred_map: BTreeMap<u64, &[Detection]> =
        preds.iter().map(|(i, d)| (*i, d.as_slice())).collect();
    let gt_map: BTreeMap<u64, &[Detection]> = gts.iter().map(|(i, d)| (*i, d.as_slice())).collect();
    let total_gt: usize = gt_map.values().map(|d| d.len()).sum();
    if total_gt == 0 {
        return Err(Error::NoGroundTruth);
    }

    let mut frame_ids: Vec<u64> = pred_map.keys().chain(gt_map.keys()).copied().collect();
    frame_ids.sort_unstable();
    frame_ids.dedup();

    let mut counts = DetectionCounts::default();
    let mut per_class_ap = BTreeMap::new();
    for class in ObjectClass::ALL {
        let mut ranked: Vec<(f64, bool)> = Vec::new();
        let mut class_gt = 0usize;
        for id in &frame_ids {
            let p = of_class(pred_map.get(id).copied().unwrap_or(&[]), class);
            let g = of_class(gt_map.get(id).copied().unwrap_or(&[]), class);
            class_gt += g.len();
            let m = match_greedy(&p, &g, cfg.iou_threshold)?;
            counts.true_positives += m.true_positives;
            counts.false_positives += m.false_positives;
            counts.false_negatives += m.false_negatives;
            ranked.extend(
                p.iter()
                    .enumerate()
                    .map(|(i, d)| (d.confidence(), m.is_matched(i))),
            );
        }
        if class_gt > 0 {
            // Stable sort keeps frame then input order among equal confidences.
            ranked.sort_by(|a, b| b.0.total_cmp(&a.0));
            per_class_ap.insert(class, average_precision(&ranked, class_gt)?);
        }
    }

    let predicted = counts.true_positives + counts.false_positives;
    let precision = if predicted == 0 {
        0.0
    } else {
        counts.true_positives as f64 / predicted as f64
    };
    let recall = counts.true_positives as f64 / total_gt as f64;

    let seg_len = cfg.segment_length as u64;
    let mut windows: BTreeMap<u64, (bool, bool, Vec<ObjectClass>)> = BTreeMap::new();
    for id in &frame_ids {
        let w = windows.entry(id / seg_len).or_default();
        for d in pred_map.get(id).copied().unwrap_or(&[]) {
            if d.class() == ObjectClass::Bear && d.confidence() >= cfg.bear_threshold {
                w.0 = true;
            }
        }
        for d in gt_map.get(id).copied().unwrap_or(&[]) {
            if d.class() == ObjectClass::Bear {
                w.1 = true;
            } else if !w.2.contains(&d.class()) {
                w.2.push(d.class());
            }
        }
    }

    let mut seg_counts = SegmentCounts::default();
    let mut labelled = Vec::new();
    for (flagged, has_bear, classes) in windows.into_values() {
        let decision = if flagged {
            SegmentDecision::BearDetected
        } else {
            SegmentDecision::NoBear
        };
        if has_bear {
            seg_counts.bear_segments += 1;
            seg_counts.bear_segments_detected += u64::from(flagged);
        } else {
            seg_counts.negative_segments += 1;
            seg_counts.negative_segments_flagged += u64::from(flagged);
            labelled.extend(classes.into_iter().map(|c| (c, decision)));
        }
    }
    let fpr = if seg_counts.negative_segments == 0 {
        0.0
    } else {
        false_positive_rate(
            seg_counts.negative_segments_flagged,
            seg_counts.negative_segments - seg_counts.negative_segments_flagged,
        )?
    };

    let report = MetricsReport::new(
        mean_average_precision(&per_class_ap)?,
        precision,
        recall,
        fpr,
        video_misclassification_rate(&labelled),
    )?;
    Ok(Evaluation {
        report,
        per_class_ap,
        detections: counts,
        segments: seg_counts,
    })
}

#[cfg(test)]
mod tests {
    use approx::assert_relative_eq;

    use super::*;

    fn bx(x: f64, y: f64, w: f64, h: f64) -> BoundingBox {
        BoundingBox::new(x, y, w, h).unwrap()
    }

    fn det(class: ObjectClass, conf: f64, b: BoundingBox) -> Detection {
        Detection::new(class, conf, b).unwrap()
    }

    #[test]
    fn iou_examples() {
        let a = bx(0.0, 0.0, 10.0, 10.0);
        assert_eq!(iou(&a, &a), 1.0);
        assert_eq!(iou(&a, &bx(100.0, 100.0, 10.0, 10.0)), 0.0);
        // touching edges have zero-area intersection
        assert_eq!(iou(&a, &bx(10.0, 0.0, 10.0, 10.0)), 0.0);
        assert_relative_eq!(
            iou(&a, &bx(5.0, 0.0, 10.0, 10.0)),
            50.0 / 150.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn match_trivial_cases() {
        let m = match_greedy(&[], &[], 0.5).unwrap();
        assert_eq!(
            (m.true_positives, m.false_positives, m.false_negatives),
            (0, 0, 0)
        );

        let d = det(ObjectClass::Bear, 0.9, bx(10.0, 10.0, 50.0, 50.0));
        let m = match_greedy(&[d], &[d], 0.5).unwrap();
        assert_eq!(
            (m.true_positives, m.false_positives, m.false_negatives),
            (1, 0, 0)
        );
        assert_eq!(m.matched_pairs[0].iou, 1.0);
    }

    #[test]
    fn match_rejects_bad_threshold_and_mixed_classes() {
        assert!(match_greedy(&[], &[], 0.0).is_err());
        assert!(match_greedy(&[], &[], 1.5).is_err());
        assert!(match_greedy(&[], &[], 1.0).is_ok());
        let b = bx(0.0, 0.0, 5.0, 5.0);
        let mixed = [
            det(ObjectClass::Bear, 0.5, b),
            det(ObjectClass::Yak, 0.5, b),
        ];
        assert!(match_greedy(&mixed, &[], 0.5).is_err());
    }

    #[test]
    fn higher_confidence_claims_ground_truth_first() {
        let gt = det(ObjectClass::Bear, 1.0, bx(0.0, 0.0, 10.0, 10.0));
        let weak = det(ObjectClass::Bear, 0.3, bx(0.0, 0.0, 10.0, 10.0));
        let strong = det(ObjectClass::Bear, 0.8, bx(1.0, 0.0, 10.0, 10.0));
        let m = match_greedy(&[weak, strong], &[gt], 0.5).unwrap();
        assert_eq!(m.matched_pairs.len(), 1);
        assert_eq!(m.matched_pairs[0].prediction, 1);
        assert_eq!(m.false_positives, 1);
    }

    #[test]
    fn confidence_ties_follow_input_order() {
        let b = bx(0.0, 0.0, 10.0, 10.0);
        let p = [
            det(ObjectClass::Bear, 0.5, b),
            det(ObjectClass::Bear, 0.5, b),
        ];
        let m = match_greedy(&p, &[det(ObjectClass::Bear, 1.0, b)], 0.5).unwrap();
        assert_eq!(m.matched_pairs[0].prediction, 0);
    }

    #[test]
    fn ap_examples() {
        assert_eq!(
            average_precision(&[(0.9, true), (0.8, true), (0.1, true)], 3).unwrap(),
            1.0
        );
        assert_eq!(average_precision(&[(0.9, false)], 1).unwrap(), 0.0);
        assert!(matches!(
            average_precision(&[], 0),
            Err(Error::NoGroundTruth)
        ));
        assert!(average_precision(&[(0.1, true), (0.9, true)], 2).is_err());
        assert!(average_precision(&[(0.9, true), (0.8, true)], 1).is_err());
        // TP, FP, TP with 2 gt: envelope precision 1 at r=0.5, 2/3 at r=1
        let ap = average_precision(&[(0.9, true), (0.8, false), (0.7, true)], 2).unwrap();
        assert_relative_eq!(ap, 0.5 + 0.5 * 2.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn map_examples() {
        let mut m = BTreeMap::new();
        assert!(mean_average_precision(&m).is_err());
        m.insert(ObjectClass::Bear, 1.0);
        assert_eq!(mean_average_precision(&m).unwrap(), 1.0);
        m.insert(ObjectClass::Bear, 0.8);
        m.insert(ObjectClass::Yak, 0.6);
        assert_relative_eq!(mean_average_precision(&m).unwrap(), 0.7, epsilon = 1e-15);
    }

    #[test]
    fn f1_examples() {
        assert_eq!(f1_score(1.0, 1.0), 1.0);
        assert_eq!(f1_score(0.0, 0.9), 0.0);
        assert_eq!(f1_score(0.0, 0.0), 0.0);
        // 2 * 0.958 * 0.936 / 1.894
        assert_relative_eq!(f1_score(0.958, 0.936), 1.793_376 / 1.894, epsilon = 1e-12);
        assert!((f1_score(0.958, 0.936) - 0.9469).abs() < 1e-4);
    }

    #[test]
    fn fpr_examples() {
        assert_eq!(false_positive_rate(0, 100).unwrap(), 0.0);
        assert_relative_eq!(
            false_positive_rate(379, 9621).unwrap(),
            0.0379,
            epsilon = 1e-15
        );
        assert!(false_positive_rate(0, 0).is_err());
    }

    #[test]
    fn misid_examples() {
        let none: Vec<_> = [
            ObjectClass::Yak,
            ObjectClass::TibetanMastiff,
            ObjectClass::Bear,
        ]
        .into_iter()
        .map(|c| (c, SegmentDecision::NoBear))
        .collect();
        let rates = video_misclassification_rate(&none);
        assert_eq!(rates.len(), 2);
        assert!(rates.values().all(|&r| r == 0.0));

        let mastiff: Vec<_> = (0..1000)
            .map(|i| {
                let d = if i < 24 {
                    SegmentDecision::BearDetected
                } else {
                    SegmentDecision::NoBear
                };
                (ObjectClass::TibetanMastiff, d)
            })
            .collect();
        let rates = video_misclassification_rate(&mastiff);
        assert_eq!(rates.len(), 1);
        assert_relative_eq!(rates[&ObjectClass::TibetanMastiff], 0.024, epsilon = 1e-15);
    }

    #[test]
    fn report_checks_ranges() {
        assert!(MetricsReport::new(0.9, 0.9, 0.9, 0.1, BTreeMap::new()).is_ok());
        assert!(MetricsReport::new(1.2, 0.9, 0.9, 0.1, BTreeMap::new()).is_err());
        let mut r = MetricsReport::new(0.9, 0.9, 0.8, 0.1, BTreeMap::new()).unwrap();
        r.f1 = 0.5;
        assert!(r.validate().is_err());
    }

    #[test]
    fn dataset_identity_is_perfect() {
        let b = bx(10.0, 10.0, 40.0, 40.0);
        let gts: Vec<FrameDetections> = (0..20)
            .map(|i| {
                let class = if i < 10 {
                    ObjectClass::Bear
                } else {
                    ObjectClass::Yak
                };
                (i, vec![det(class, 1.0, b)])
            })
            .collect();
        let e = evaluate_dataset(&gts, &gts, &EvalConfig::default()).unwrap();
        assert_eq!(e.report.map_value, 1.0);
        assert_eq!(e.report.recall, 1.0);
        assert_eq!(e.report.precision, 1.0);
        assert_eq!(e.report.fpr, 0.0);
        assert_eq!(e.report.per_class_video_misid[&ObjectClass::Yak], 0.0);
        assert_eq!(e.segments.video_recall(), Some(1.0));
    }

    #[test]
    fn dataset_without_predictions() {
        let b = bx(10.0, 10.0, 40.0, 40.0);
        let gts = vec![(0, vec![det(ObjectClass::Bear, 1.0, b)])];
        let e = evaluate_dataset(&[], &gts, &EvalConfig::default()).unwrap();
        assert_eq!(e.report.recall, 0.0);
        assert_eq!(e.report.map_value, 0.0);
        assert!(matches!(
            evaluate_dataset(&gts, &[], &EvalConfig::default()),
            Err(Error::NoGroundTruth)
        ));
    }

    #[test]
    fn confused_yak_window_counts_as_false_positive() {
        let b = bx(10.0, 10.0, 40.0, 40.0);
        let gts: Vec<FrameDetections> = (0..20)
            .map(|i| (i, vec![det(ObjectClass::Yak, 1.0, b)]))
            .collect();
        let preds = vec![(3, vec![det(ObjectClass::Bear, 0.9, b)])];
        let e = evaluate_dataset(&preds, &gts, &EvalConfig::default()).unwrap();
        assert_eq!(e.segments.negative_segments, 2);
        assert_eq!(e.report.fpr, 0.5);
        assert_eq!(e.report.per_class_video_misid[&ObjectClass::Yak], 0.5);
        assert_eq!(e.detections.false_positives, 1);
    }
}

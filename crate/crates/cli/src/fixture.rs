//! Synthetic evaluation set whose scores land on a chosen operating point.
//!
//! Each class gets a block of frames with one ground-truth box per frame.
//! The first `TRUE_POSITIVES` frames of a block carry a well-aligned
//! prediction and the rest are missed. Each class also gets a run of false
//! positives well away from every ground-truth box, all at one confidence
//! slotted between two true positives. With `m` true positives ranked
//! above that run, the interpolated AP is
//!
//! ```text
//! AP(m) = (m + (T - m) * T / (T + F)) / G
//! ```
//!
//! so `m` is chosen per class to hit a target AP.

use std::io;
use std::path::Path;

use bearguard_core::annotations::{write_annotations, FrameDetections};
use bearguard_core::model::{BoundingBox, Detection, ObjectClass};

pub const CLASSES: [ObjectClass; 4] = [
    ObjectClass::Bear,
    ObjectClass::Yak,
    ObjectClass::TibetanMastiff,
    ObjectClass::Human,
];
/// Ground-truth boxes per class.
pub const GROUND_TRUTH: usize = 250;
/// Matched predictions per class.
pub const TRUE_POSITIVES: usize = 234;
pub const FALSE_POSITIVES: [usize; 4] = [8, 12, 10, 11];
pub const TARGET_AP: [f64; 4] = [0.930, 0.905, 0.912, 0.909];

pub const GROUND_TRUTH_FILE: &str = "ground_truth.csv";
pub const PREDICTIONS_FILE: &str = "predictions.csv";

/// Number of true positives to rank above the false-positive run.
pub fn split_for(target_ap: f64, t: usize, f: usize, g: usize) -> usize {
    let tail = t as f64 / (t + f) as f64;
    let m = (target_ap * g as f64 - t as f64 * tail) / (1.0 - tail);
    (m.round().max(0.0) as usize).min(t)
}

fn gt_box(i: usize) -> BoundingBox {
    let w = 50.0 + (i % 5) as f64 * 5.0;
    BoundingBox::new(
        5.0 + ((i * 37) % 60) as f64,
        5.0 + ((i * 53) % 60) as f64,
        w,
        w,
    )
    .expect("inside the frame")
}

fn shifted(b: &BoundingBox) -> BoundingBox {
    BoundingBox::new(b.x() + 3.0, b.y() + 3.0, b.w(), b.h()).expect("inside the frame")
}

fn det(class: ObjectClass, conf: f64, b: BoundingBox) -> Detection {
    // six decimals keep the CSV readable; neighbours differ by ~4e-3
    let conf = (conf * 1e6).round() / 1e6;
    Detection::new(class, conf, b).expect("valid detection")
}

/// `(predictions, ground_truth)`, grouped by frame.
pub fn build() -> (Vec<FrameDetections>, Vec<FrameDetections>) {
    let t = TRUE_POSITIVES;
    let stray = BoundingBox::new(155.0, 155.0, 50.0, 50.0).expect("inside the frame");
    let mut preds = Vec::new();
    let mut gts = Vec::new();
    for (c, &class) in CLASSES.iter().enumerate() {
        let f = FALSE_POSITIVES[c];
        let m = split_for(TARGET_AP[c], t, f, GROUND_TRUTH);
        let tp_conf = |i: usize| 0.99 - 0.9 * i as f64 / t as f64;
        let fp_conf = if m == 0 {
            0.995
        } else {
            0.5 * (tp_conf(m - 1) + tp_conf(m))
        };
        for i in 0..GROUND_TRUTH {
            let frame = (c * GROUND_TRUTH + i) as u64;
            let g = gt_box(i);
            gts.push((frame, vec![det(class, 1.0, g)]));
            let mut p = Vec::new();
            if i < t {
                p.push(det(class, tp_conf(i), shifted(&g)));
            }
            if i < f {
                p.push(det(class, fp_conf, stray));
            }
            if !p.is_empty() {
                preds.push((frame, p));
            }
        }
    }
    (preds, gts)
}

pub fn to_csv(frames: &[FrameDetections]) -> Vec<u8> {
    let mut buf = Vec::new();
    write_annotations(frames, &mut buf).expect("in-memory write");
    buf
}

/// Writes both CSVs into `dir`.
pub fn write_to(dir: &Path) -> io::Result<()> {
    let (preds, gts) = build();
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join(PREDICTIONS_FILE), to_csv(&preds))?;
    std::fs::write(dir.join(GROUND_TRUTH_FILE), to_csv(&gts))
}

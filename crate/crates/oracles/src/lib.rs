//! Slow, direct reference implementations. Nothing here calls into the
//! library's algorithms; only its value types are shared.

use bearguard_core::controller::ControllerConfig;
use bearguard_core::model::{BoundingBox, Detection, EventKind, EventRecord};

/// Intersection-over-union by interval overlap on each axis.
pub fn iou(a: &BoundingBox, b: &BoundingBox) -> f64 {
    fn overlap(a0: f64, a1: f64, b0: f64, b1: f64) -> f64 {
        let lo = if a0 > b0 { a0 } else { b0 };
        let hi = if a1 < b1 { a1 } else { b1 };
        if hi > lo {
            hi - lo
        } else {
            0.0
        }
    }
    let inter = overlap(a.x(), a.x() + a.w(), b.x(), b.x() + b.w())
        * overlap(a.y(), a.y() + a.h(), b.y(), b.y() + b.h());
    inter / (a.w() * a.h() + b.w() * b.h() - inter)
}

/// IoU of integer-aligned boxes by counting unit cells.
pub fn iou_by_cells(a: &BoundingBox, b: &BoundingBox) -> f64 {
    let cells = |bx: &BoundingBox| {
        let (x0, y0) = (bx.x() as i64, bx.y() as i64);
        let (x1, y1) = (x0 + bx.w() as i64, y0 + bx.h() as i64);
        (x0, y0, x1, y1)
    };
    let (ax0, ay0, ax1, ay1) = cells(a);
    let (bx0, by0, bx1, by1) = cells(b);
    let (mut inter, mut union) = (0u64, 0u64);
    for x in ax0.min(bx0)..ax1.max(bx1) {
        for y in ay0.min(by0)..ay1.max(by1) {
            let in_a = x >= ax0 && x < ax1 && y >= ay0 && y < ay1;
            let in_b = x >= bx0 && x < bx1 && y >= by0 && y < by1;
            inter += u64::from(in_a && in_b);
            union += u64::from(in_a || in_b);
        }
    }
    inter as f64 / union as f64
}

/// Matching by enumerating every one-to-one assignment of predictions (in
/// descending confidence, ties by index) to ground truth with IoU at or
/// above the threshold, keeping the lexicographically best one: first by the
/// IoU each prediction gets in visiting order, then by the lower
/// ground-truth index. Returns the matched ground truth per prediction.
pub fn exhaustive_match(
    preds: &[Detection],
    gts: &[Detection],
    threshold: f64,
) -> Vec<Option<usize>> {
    let mut order: Vec<usize> = (0..preds.len()).collect();
    // insertion sort: stable, obviously correct
    for i in 1..order.len() {
        let mut j = i;
        while j > 0 && preds[order[j]].confidence() > preds[order[j - 1]].confidence() {
            order.swap(j, j - 1);
            j -= 1;
        }
    }

    // key element per visited prediction: (iou, -gt index); unmatched = (0, 0)
    type Key = Vec<(f64, i64)>;
    fn better(a: &Key, b: &Key) -> bool {
        for (x, y) in a.iter().zip(b) {
            if x.0 != y.0 {
                return x.0 > y.0;
            }
            if x.1 != y.1 {
                return x.1 > y.1;
            }
        }
        false
    }

    struct Search<'a> {
        preds: &'a [Detection],
        gts: &'a [Detection],
        order: Vec<usize>,
        threshold: f64,
        best: Option<(Key, Vec<Option<usize>>)>,
    }

    impl Search<'_> {
        fn go(
            &mut self,
            k: usize,
            used: &mut Vec<bool>,
            key: &mut Key,
            assign: &mut Vec<Option<usize>>,
        ) {
            if k == self.order.len() {
                if self.best.as_ref().is_none_or(|(b, _)| better(key, b)) {
                    self.best = Some((key.clone(), assign.clone()));
                }
                return;
            }
            let p = self.order[k];
            key.push((0.0, 0));
            self.go(k + 1, used, key, assign);
            key.pop();
            for g in 0..self.gts.len() {
                if used[g] {
                    continue;
                }
                let v = iou(self.preds[p].bbox(), self.gts[g].bbox());
                if v < self.threshold {
                    continue;
                }
                used[g] = true;
                assign[p] = Some(g);
                key.push((v, -(g as i64)));
                self.go(k + 1, used, key, assign);
                key.pop();
                assign[p] = None;
                used[g] = false;
            }
        }
    }

    let mut s = Search {
        preds,
        gts,
        order,
        threshold,
        best: None,
    };
    s.go(
        0,
        &mut vec![false; gts.len()],
        &mut Vec::new(),
        &mut vec![None; preds.len()],
    );
    s.best.map(|b| b.1).unwrap_or_default()
}

/// All-point AP by integrating the interpolated precision over the distinct
/// recall levels reached at every rank cut. Interpolated precision at recall
/// r is the best precision of any cut whose recall is at least r.
pub fn staircase_ap(ranked: &[(f64, bool)], total_gt: usize) -> f64 {
    let mut cuts = Vec::new();
    for k in 1..=ranked.len() {
        let tp = ranked[..k].iter().filter(|r| r.1).count();
        cuts.push((tp as f64 / total_gt as f64, tp as f64 / k as f64));
    }
    let mut levels: Vec<f64> = cuts.iter().map(|c| c.0).filter(|&r| r > 0.0).collect();
    levels.sort_by(f64::total_cmp);
    levels.dedup();

    let mut ap = 0.0;
    let mut prev = 0.0;
    for r in levels {
        let p = cuts
            .iter()
            .filter(|c| c.0 >= r)
            .map(|c| c.1)
            .fold(0.0, f64::max);
        ap += (r - prev) * p;
        prev = r;
    }
    ap
}

/// A controller input reduced to what the rules look at.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimelineStep {
    pub time: f64,
    pub bear: bool,
    pub human: bool,
    pub max_bear_confidence: f64,
}

/// Straight-line reimplementation of the spray rules.
pub fn interpret_controller(steps: &[TimelineStep], cfg: &ControllerConfig) -> Vec<EventRecord> {
    let mut out = Vec::new();
    let mut remaining = cfg.canister_total_sprays;
    let mut ready_at = f64::NEG_INFINITY;
    for s in steps {
        if !s.bear {
            continue;
        }
        if s.human && cfg.human_inhibit {
            out.push(
                EventRecord::new(&cfg.device_id, s.time, EventKind::SprayInhibited)
                    .with("decision_time", s.time)
                    .with("reason", "human_present")
                    .with("max_bear_confidence", s.max_bear_confidence),
            );
            continue;
        }
        if remaining == 0 || s.time < ready_at {
            continue;
        }
        remaining -= 1;
        let trigger = s.time + cfg.actuation_delay;
        ready_at = trigger + cfg.spray_duration + cfg.cooldown;
        out.push(
            EventRecord::new(&cfg.device_id, s.time, EventKind::SprayTriggered)
                .with("trigger_time", trigger)
                .with("decision_time", s.time)
                .with("duration", cfg.spray_duration)
                .with("sprays_remaining_after", remaining),
        );
    }
    out
}

/// Exact depletion time (s) of a battery starting full under a square-wave
/// harvest: `day_s` seconds at `day_harvest_w`, then darkness, repeating
/// every 24 h, with constant `draw_w`. Charging saturates at capacity.
pub fn square_wave_depletion(
    capacity_wh: f64,
    draw_w: f64,
    day_harvest_w: f64,
    day_s: f64,
    horizon_s: f64,
) -> Option<f64> {
    let mut energy_ws = capacity_wh * 3600.0;
    let cap_ws = energy_ws;
    let mut t = 0.0;
    while t < horizon_s {
        let day_start = t;
        for (len, net_w) in [(day_s, day_harvest_w - draw_w), (86_400.0 - day_s, -draw_w)] {
            if net_w < 0.0 && energy_ws + net_w * len <= 0.0 {
                let hit = t + energy_ws / -net_w;
                return (hit <= horizon_s).then_some(hit);
            }
            energy_ws = (energy_ws + net_w * len).min(cap_ws);
            t += len;
        }
        debug_assert!((t - day_start - 86_400.0).abs() < 1e-6);
    }
    None
}

/// Random single-image detection problem.
#[derive(Debug, Clone)]
pub struct Instance {
    pub predictions: Vec<Detection>,
    pub ground_truth: Vec<Detection>,
}

/// Up to `max_preds` predictions and 1..=`max_gts` ground-truth boxes for
/// each of `classes`. Boxes are jittered copies of a few anchors so overlaps
/// and near-threshold IoUs are common; confidences come from a coarse grid
/// so ties occur.
pub fn random_instance<R: rand::Rng>(
    rng: &mut R,
    classes: &[bearguard_core::model::ObjectClass],
    max_preds: usize,
    max_gts: usize,
) -> Instance {
    let anchors: Vec<(f64, f64)> = (0..3)
        .map(|_| {
            (
                rng.random_range(0..150) as f64,
                rng.random_range(0..150) as f64,
            )
        })
        .collect();
    let jittered = |rng: &mut R| {
        let (ax, ay) = anchors[rng.random_range(0..anchors.len())];
        let x = (ax + rng.random_range(-6.0..6.0)).clamp(0.0, 170.0);
        let y = (ay + rng.random_range(-6.0..6.0)).clamp(0.0, 170.0);
        let w = rng.random_range(20.0..50.0);
        let h = rng.random_range(20.0..50.0);
        BoundingBox::new(x, y, w, h).expect("inside frame")
    };
    let mut predictions = Vec::new();
    let mut ground_truth = Vec::new();
    for &class in classes {
        for _ in 0..rng.random_range(1..=max_gts) {
            ground_truth.push(Detection::new(class, 1.0, jittered(rng)).unwrap());
        }
        for _ in 0..rng.random_range(0..=max_preds) {
            let conf = rng.random_range(1..=10) as f64 / 10.0;
            predictions.push(Detection::new(class, conf, jittered(rng)).unwrap());
        }
    }
    Instance {
        predictions,
        ground_truth,
    }
}

/// Per-class AP of a single-image instance, computed with
/// [`exhaustive_match`] and [`staircase_ap`].
pub fn instance_ap(
    inst: &Instance,
    threshold: f64,
) -> std::collections::BTreeMap<bearguard_core::model::ObjectClass, f64> {
    let mut out = std::collections::BTreeMap::new();
    for class in bearguard_core::model::ObjectClass::ALL {
        let p: Vec<Detection> = inst
            .predictions
            .iter()
            .copied()
            .filter(|d| d.class() == class)
            .collect();
        let g: Vec<Detection> = inst
            .ground_truth
            .iter()
            .copied()
            .filter(|d| d.class() == class)
            .collect();
        if g.is_empty() {
            continue;
        }
        let assign = exhaustive_match(&p, &g, threshold);
        let mut ranked: Vec<(f64, bool)> = p
            .iter()
            .zip(&assign)
            .map(|(d, a)| (d.confidence(), a.is_some()))
            .collect();
        // stable: equal confidences keep input order
        ranked.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
        out.insert(class, staircase_ap(&ranked, g.len()));
    }
    out
}

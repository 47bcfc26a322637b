use serde::{Deserialize, Serialize};

use super::scenario::Scenario;
use crate::annotations::FrameDetections;
use crate::controller::{step, ControllerConfig, ControllerState};
use crate::error::{Error, Result};
use crate::metrics::{evaluate_dataset, EvalConfig, Evaluation};
use crate::model::{EventKind, EventRecord, Frame, Segment, SegmentDecision};
use crate::segment::{segment_stream, FilterConfig, Windowing};

/// Event tallies, as `replay` would count them from the log.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventCounts {
    pub segments: u64,
    pub bear_segments: u64,
    pub sprays: u64,
    pub inhibits: u64,
    pub battery_low: u64,
}

impl EventCounts {
    pub fn from_events(events: &[EventRecord]) -> Self {
        let mut c = EventCounts::default();
        for e in events {
            match e.kind {
                EventKind::SegmentDecision => {
                    c.segments += 1;
                    if e.payload.get("decision").and_then(|v| v.as_str()) == Some("BearDetected") {
                        c.bear_segments += 1;
                    }
                }
                EventKind::SprayTriggered => c.sprays += 1,
                EventKind::SprayInhibited => c.inhibits += 1,
                EventKind::BatteryLow => c.battery_low += 1,
            }
        }
        c
    }
}

#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub segments: Vec<Segment>,
    pub events: Vec<EventRecord>,
    /// `None` when nothing was ever in view, so there is no ground truth to
    /// score against.
    pub evaluation: Option<Evaluation>,
    pub counts: EventCounts,
    pub final_state: ControllerState,
}

fn decision_name(d: SegmentDecision) -> &'static str {
    match d {
        SegmentDecision::BearDetected => "BearDetected",
        SegmentDecision::NoBear => "NoBear",
    }
}

/// Render, segment, drive the controller and score, all from the scenario's
/// seed.
///
/// Each segment is logged as a `SegmentDecision` at its last frame's time,
/// followed by whatever the controller emitted for it.
pub fn run_pipeline(
    scenario: &Scenario,
    filter_cfg: &FilterConfig,
    ctrl_cfg: &ControllerConfig,
) -> Result<PipelineOutput> {
    filter_cfg.validate()?;
    ctrl_cfg.validate()?;

    let mut frames: Vec<Frame> = Vec::new();
    let mut truth: Vec<FrameDetections> = Vec::new();
    let mut predictions: Vec<FrameDetections> = Vec::new();
    for r in scenario.renderer()? {
        let idx = r.frame.index();
        if !r.frame.detections().is_empty() {
            predictions.push((idx, r.frame.detections().to_vec()));
        }
        if !r.truth.is_empty() {
            truth.push((idx, r.truth));
        }
        frames.push(r.frame);
    }

    let segments = segment_stream(&frames, filter_cfg)?;

    let mut state = ControllerState::new(ctrl_cfg);
    let mut events = Vec::with_capacity(segments.len());
    for (i, seg) in segments.iter().enumerate() {
        let now = seg.end_time();
        let human = ctrl_cfg.human_in(seg);
        events.push(
            EventRecord::new(&ctrl_cfg.device_id, now, EventKind::SegmentDecision)
                .with("segment_index", i as u64)
                .with("start_frame", seg.start_index())
                .with("decision", decision_name(seg.decision()))
                .with("max_bear_confidence", seg.max_bear_confidence())
                .with("human_present", human),
        );
        let (next, event) = step(&state, seg, human, now, ctrl_cfg)?;
        state = next;
        events.extend(event);
    }

    // Score only frames that fall inside a full tumbling window.
    let scored_frames = match filter_cfg.windowing {
        Windowing::Tumbling => (segments.len() * filter_cfg.segment_length) as u64,
        Windowing::Sliding => frames.len() as u64,
    };
    truth.retain(|(i, _)| *i < scored_frames);
    predictions.retain(|(i, _)| *i < scored_frames);
    let eval_cfg = EvalConfig {
        segment_length: filter_cfg.segment_length,
        bear_threshold: filter_cfg.bear_threshold,
        ..EvalConfig::default()
    };
    let evaluation = match evaluate_dataset(&predictions, &truth, &eval_cfg) {
        Ok(e) => Some(e),
        Err(Error::NoGroundTruth) => None,
        Err(e) => return Err(e),
    };

    Ok(PipelineOutput {
        counts: EventCounts::from_events(&events),
        segments,
        events,
        evaluation,
        final_state: state,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Lighting, ObjectClass};
    use crate::sim::{CameraSpec, DetectorProfile, EntityTrack, Waypoint};

    fn scenario(tracks: Vec<EntityTrack>, duration: f64) -> Scenario {
        Scenario {
            camera: CameraSpec::default(),
            tracks,
            duration,
            lighting: Lighting::Day,
            detector: DetectorProfile {
                true_positive_rate: 1.0,
                confidence_distributions: [ObjectClass::Bear, ObjectClass::Human]
                    .into_iter()
                    .map(|c| {
                        (
                            c,
                            crate::sim::ConfidenceDist {
                                mean: 0.9,
                                spread: 0.0,
                            },
                        )
                    })
                    .collect(),
                seed: 11,
                ..Default::default()
            },
        }
    }

    fn track(class: ObjectClass, pts: &[(f64, f64, f64)]) -> EntityTrack {
        EntityTrack {
            entity_class: class,
            waypoints: pts
                .iter()
                .map(|&(time, x, y)| Waypoint { time, x, y })
                .collect(),
            size: 1.8,
        }
    }

    #[test]
    fn empty_scenario_has_only_no_bear_segments() {
        let out = run_pipeline(
            &scenario(vec![], 10.0),
            &FilterConfig::default(),
            &ControllerConfig::default(),
        )
        .unwrap();
        assert_eq!(out.segments.len(), 10);
        assert!(out.segments.iter().all(|s| !s.is_bear()));
        assert_eq!(out.counts.sprays, 0);
        assert_eq!(out.counts.segments, 10);
        assert!(out.evaluation.is_none());
    }

    #[test]
    fn bear_and_human_inhibits() {
        let sc = scenario(
            vec![
                track(ObjectClass::Bear, &[(0.0, 12.0, 0.0), (10.0, 8.0, 0.0)]),
                track(ObjectClass::Human, &[(0.0, 6.0, 3.0), (10.0, 6.0, 3.0)]),
            ],
            10.0,
        );
        let out =
            run_pipeline(&sc, &FilterConfig::default(), &ControllerConfig::default()).unwrap();
        assert_eq!(out.counts.sprays, 0);
        assert_eq!(out.counts.inhibits, 10);
        assert_eq!(out.final_state.sprays_remaining, 20);
    }

    #[test]
    fn counts_match_log() {
        let sc = scenario(
            vec![track(
                ObjectClass::Bear,
                &[(0.0, 30.0, 0.0), (60.0, 2.0, 0.0)],
            )],
            60.0,
        );
        let out =
            run_pipeline(&sc, &FilterConfig::default(), &ControllerConfig::default()).unwrap();
        assert_eq!(out.counts, EventCounts::from_events(&out.events));
        // in range from t = 10.7 s; first spray at the 11.9 s segment, the
        // next once the 31.05 s lockout ends, at the 43.9 s segment
        assert_eq!(out.counts.sprays, 2);
        let e = out.evaluation.unwrap();
        assert_eq!(e.report.recall, 1.0);
    }
}

//! Plain-Rust halves of the browser operations, testable off the browser.

use bearguard_core::controller::ControllerConfig;
use bearguard_core::model::{EventKind, Lighting, ObjectClass};
use bearguard_core::power::{
    capacity_wh, duty_cycle_sweep, max_duty_cycle_for, runtime_days, simulate_soc, ConstantHarvest,
    DayNightHarvest, HarvestProfile, PowerConfig, SECONDS_PER_DAY,
};
use bearguard_core::segment::FilterConfig;
use bearguard_core::sim::{
    run_pipeline, segment_rate_closed_form, CameraSpec, ConfidenceDist, DetectorProfile,
    EntityTrack, MisidExperiment, Scenario, Waypoint,
};
use bearguard_core::Result;
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct RateReport {
    pub closed_form: f64,
    pub monte_carlo: f64,
    pub standard_error: f64,
    pub segments: u64,
    /// `(p, 1 - (1 - p)^n)` over a log-spaced range of p.
    pub curve: Vec<(f64, f64)>,
}

/// Segment misidentification rate for per-frame misfire `p`, simulated and
/// closed form.
pub fn segment_rates(
    p: f64,
    segment_length: usize,
    segments: u64,
    seed: u64,
) -> Result<RateReport> {
    let tally = MisidExperiment {
        class: ObjectClass::Yak,
        per_frame_misfire: p,
        segments,
        batches: 1,
        seed,
        filter: FilterConfig {
            segment_length,
            ..FilterConfig::default()
        },
        camera: CameraSpec::default(),
    }
    .run()?;
    let closed_form = segment_rate_closed_form(p, segment_length);
    let curve = (0..=60)
        .map(|i| {
            let q = 10f64.powf(-4.0 + 3.0 * f64::from(i) / 60.0);
            (q, segment_rate_closed_form(q, segment_length))
        })
        .collect();
    Ok(RateReport {
        closed_form,
        monte_carlo: tally.rate(),
        standard_error: tally.standard_error(closed_form),
        segments: tally.segments,
        curve,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct PowerReport {
    pub capacity_wh: f64,
    pub average_draw_mw: f64,
    /// `None` when harvest covers the draw.
    pub runtime_no_solar: Option<f64>,
    pub runtime_solar: Option<f64>,
    pub max_duty_for_30_days: Option<f64>,
    /// `(day, Wh)`, at most ~500 points.
    pub soc: Vec<(f64, f64)>,
    pub depleted_day: Option<f64>,
    pub sweep: Vec<(f64, Option<f64>)>,
}

/// `day_fraction` of 0 means constant harvest.
pub fn power_profile(
    duty_cycle: f64,
    panel_w: f64,
    derating: f64,
    day_fraction: f64,
    horizon_days: f64,
) -> Result<PowerReport> {
    let cfg = PowerConfig {
        duty_cycle_active: duty_cycle,
        panel_rating: panel_w,
        harvest_derating: derating,
        ..PowerConfig::default()
    };
    cfg.validate()?;
    let profile: Box<dyn HarvestProfile> = if day_fraction > 0.0 {
        Box::new(DayNightHarvest::matching_mean(&cfg, day_fraction.min(1.0)))
    } else {
        Box::new(ConstantHarvest(derating))
    };
    let dt = 600.0;
    let series = simulate_soc(&cfg, horizon_days, dt, profile.as_ref())?;
    let stride = series.samples.len().div_ceil(500).max(1);
    let soc = series
        .samples
        .iter()
        .step_by(stride)
        .map(|s| (s.time / SECONDS_PER_DAY, s.energy_remaining))
        .collect();
    Ok(PowerReport {
        capacity_wh: capacity_wh(&cfg),
        average_draw_mw: cfg.average_draw_mw(),
        runtime_no_solar: runtime_days(&cfg, false).days(),
        runtime_solar: runtime_days(&cfg, true).days(),
        max_duty_for_30_days: max_duty_cycle_for(&cfg, 30.0),
        soc,
        depleted_day: series.depleted_at.map(|t| t / SECONDS_PER_DAY),
        sweep: duty_cycle_sweep(&cfg, 20)
            .into_iter()
            .map(|r| (r.duty_cycle_active, r.runtime.days()))
            .collect(),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SegmentMark {
    pub end_time: f64,
    pub bear: bool,
    pub max_bear_confidence: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ApproachReport {
    pub horizontal_fov: f64,
    pub max_detection_range: f64,
    pub bear_path: Vec<(f64, f64)>,
    pub human: Option<(f64, f64)>,
    pub segments: Vec<SegmentMark>,
    pub sprays: Vec<f64>,
    pub inhibits: Vec<f64>,
}

/// A bear walking in a straight line past the camera over 60 s, optionally
/// with a person standing at `human`.
pub fn approach(
    horizontal_fov: f64,
    max_detection_range: f64,
    start: (f64, f64),
    end: (f64, f64),
    human: Option<(f64, f64)>,
    seed: u64,
) -> Result<ApproachReport> {
    let duration = 60.0;
    let still = |class, (x, y): (f64, f64), size| EntityTrack {
        entity_class: class,
        waypoints: vec![
            Waypoint { time: 0.0, x, y },
            Waypoint {
                time: duration,
                x,
                y,
            },
        ],
        size,
    };
    let mut tracks = vec![EntityTrack {
        entity_class: ObjectClass::Bear,
        waypoints: vec![
            Waypoint {
                time: 0.0,
                x: start.0,
                y: start.1,
            },
            Waypoint {
                time: duration,
                x: end.0,
                y: end.1,
            },
        ],
        size: 1.8,
    }];
    if let Some(h) = human {
        tracks.push(still(ObjectClass::Human, h, 1.7));
    }
    let scenario = Scenario {
        camera: CameraSpec {
            horizontal_fov,
            max_detection_range,
            ..CameraSpec::default()
        },
        tracks,
        duration,
        lighting: Lighting::Day,
        detector: DetectorProfile {
            confidence_distributions: [
                (
                    ObjectClass::Bear,
                    ConfidenceDist {
                        mean: 0.85,
                        spread: 0.1,
                    },
                ),
                (
                    ObjectClass::Human,
                    ConfidenceDist {
                        mean: 0.85,
                        spread: 0.1,
                    },
                ),
            ]
            .into_iter()
            .collect(),
            seed,
            ..DetectorProfile::default()
        },
    };
    let out = run_pipeline(
        &scenario,
        &FilterConfig::default(),
        &ControllerConfig::default(),
    )?;
    let times = |kind| {
        out.events
            .iter()
            .filter(|e| e.kind == kind)
            .map(|e| e.timestamp)
            .collect()
    };
    Ok(ApproachReport {
        horizontal_fov,
        max_detection_range,
        bear_path: (0..=60)
            .map(|i| {
                let f = f64::from(i) / 60.0;
                (
                    start.0 + f * (end.0 - start.0),
                    start.1 + f * (end.1 - start.1),
                )
            })
            .collect(),
        human,
        segments: out
            .segments
            .iter()
            .map(|s| SegmentMark {
                end_time: s.end_time(),
                bear: s.is_bear(),
                max_bear_confidence: s.max_bear_confidence(),
            })
            .collect(),
        sprays: times(EventKind::SprayTriggered),
        inhibits: times(EventKind::SprayInhibited),
    })
}

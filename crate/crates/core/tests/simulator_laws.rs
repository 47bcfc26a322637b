use bearguard_core::controller::ControllerConfig;
use bearguard_core::eventlog::write_event_log;
use bearguard_core::model::{Lighting, ObjectClass};
use bearguard_core::segment::FilterConfig;
use bearguard_core::sim::{
    render_frames, run_pipeline, segment_rate_closed_form, visible, CameraSpec, DetectorProfile,
    EntityTrack, MisidExperiment, Scenario, Waypoint,
};
use proptest::prelude::*;

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
fn edge_of_fov_is_visible() {
    let cam = CameraSpec::default();
    // atan2(10, 10) is exactly half the 90 degree field of view
    assert_eq!(10f64.atan2(10.0).to_degrees().round(), 45.0);
    assert!(visible(&cam, (10.0, 10.0)));
}

#[test]
fn segment_rate_follows_independent_frame_law() {
    let p = 0.01;
    let tally = MisidExperiment {
        class: ObjectClass::TibetanMastiff,
        per_frame_misfire: p,
        segments: 20_000,
        batches: 4,
        seed: 99,
        filter: FilterConfig::default(),
        camera: CameraSpec::default(),
    }
    .run()
    .unwrap();
    let expected = segment_rate_closed_form(p, 10);
    let se = tally.standard_error(expected);
    assert!(
        (tally.rate() - expected).abs() <= 4.0 * se,
        "{} vs {expected}",
        tally.rate()
    );
}

fn approach(lighting: Lighting, seed: u64) -> Scenario {
    Scenario {
        camera: CameraSpec::default(),
        tracks: vec![track(
            ObjectClass::Bear,
            &[(0.0, 24.0, -5.0), (600.0, 6.0, 4.0)],
        )],
        duration: 600.0,
        lighting,
        detector: DetectorProfile {
            true_positive_rate: 0.12,
            night_degradation: 0.5,
            seed,
            ..Default::default()
        },
    }
}

#[test]
fn night_recall_does_not_beat_day() {
    let (mut day_hits, mut night_hits, mut n) = (0u64, 0u64, 0u64);
    for seed in 0..20 {
        let run = |l| {
            run_pipeline(
                &approach(l, seed),
                &FilterConfig::default(),
                &ControllerConfig::default(),
            )
            .unwrap()
            .evaluation
            .unwrap()
            .segments
        };
        let (d, nt) = (run(Lighting::Day), run(Lighting::Night));
        day_hits += d.bear_segments_detected;
        night_hits += nt.bear_segments_detected;
        n += d.bear_segments;
        assert_eq!(d.bear_segments, nt.bear_segments);
    }
    let (pd, pn) = (day_hits as f64 / n as f64, night_hits as f64 / n as f64);
    let se = (pd * (1.0 - pd) / n as f64 + pn * (1.0 - pn) / n as f64).sqrt();
    assert!(pn <= pd + 4.0 * se, "night {pn} vs day {pd}");
    assert!(pn < pd);
}

#[test]
fn same_seed_same_log() {
    let sc = approach(Lighting::Night, 17);
    let log = |sc: &Scenario| {
        let out = run_pipeline(sc, &FilterConfig::default(), &ControllerConfig::default()).unwrap();
        let mut buf = Vec::new();
        write_event_log(&out.events, &mut buf).unwrap();
        buf
    };
    assert_eq!(log(&sc), log(&sc));
    assert_ne!(log(&sc), log(&approach(Lighting::Night, 18)));
}

#[test]
fn bear_approach_sprays_once_within_budget() {
    // bear walks in from 40 m and crosses the 25 m range at t = 5 s
    let mut sc = approach(Lighting::Day, 1);
    sc.duration = 20.0;
    sc.tracks = vec![track(
        ObjectClass::Bear,
        &[(0.0, 40.0, 0.0), (20.0, -20.0, 0.0)],
    )];
    sc.detector.true_positive_rate = 1.0;
    sc.detector.confidence_distributions.insert(
        ObjectClass::Bear,
        bearguard_core::sim::ConfidenceDist {
            mean: 0.9,
            spread: 0.0,
        },
    );
    let out = run_pipeline(&sc, &FilterConfig::default(), &ControllerConfig::default()).unwrap();
    let first_bear = out.segments.iter().find(|s| s.is_bear()).unwrap();
    assert_eq!(first_bear.end_time(), 5.9);
    let sprays: Vec<_> = out
        .events
        .iter()
        .filter_map(bearguard_core::controller::SprayEvent::from_record)
        .collect();
    assert_eq!(sprays.len(), 1);
    assert_eq!(sprays[0].decision_time, first_bear.end_time());
    assert!(sprays[0].latency() <= 0.2);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn out_of_range_never_detected(r in 25.01..200.0f64, theta in -std::f64::consts::PI..std::f64::consts::PI, seed in any::<u64>()) {
        let (x, y) = (r * theta.cos(), r * theta.sin());
        let mut detector = DetectorProfile { true_positive_rate: 1.0, seed, ..Default::default() };
        detector.confusion.insert(ObjectClass::Yak, 1.0);
        let sc = Scenario {
            camera: CameraSpec::default(),
            tracks: vec![
                track(ObjectClass::Yak, &[(0.0, x, y), (3.0, x, y)]),
                track(ObjectClass::Bear, &[(0.0, x, y), (3.0, x, y)]),
            ],
            duration: 3.0,
            lighting: Lighting::Day,
            detector,
        };
        prop_assert!(render_frames(&sc).unwrap().iter().all(|f| f.detections().is_empty()));
    }
}

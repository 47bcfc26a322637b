use bearguard_web::demo::{approach, power_profile, segment_rates};

#[test]
fn rates_track_closed_form() {
    let r = segment_rates(0.00243, 10, 20_000, 1).unwrap();
    assert!((r.closed_form - 0.024).abs() < 5e-4);
    assert!((r.monte_carlo - r.closed_form).abs() < 4.0 * r.standard_error);
    assert_eq!(r.curve.len(), 61);
    assert!(r.curve.windows(2).all(|w| w[1].1 > w[0].1));
}

#[test]
fn power_defaults() {
    let r = power_profile(1.0, 1.0, 0.15, 0.0, 30.0).unwrap();
    assert!((r.runtime_no_solar.unwrap() - 3.3917).abs() < 1e-4);
    assert!((r.max_duty_for_30_days.unwrap() - 0.0218).abs() < 1e-4);
    assert!(r.soc.len() <= 520);
    assert!(r.depleted_day.is_some());
    assert!(r.sweep.iter().any(|(_, d)| d.is_none_or(|d| d >= 30.0)));
    assert!(power_profile(2.0, 1.0, 0.15, 0.0, 30.0).is_err());
}

#[test]
fn approach_with_and_without_person() {
    let alone = approach(90.0, 25.0, (30.0, 3.0), (3.0, 0.0), None, 4).unwrap();
    assert!(!alone.sprays.is_empty());
    assert!(alone.inhibits.is_empty());
    let watched = approach(90.0, 25.0, (30.0, 3.0), (3.0, 0.0), Some((6.0, -2.0)), 4).unwrap();
    assert!(watched.sprays.is_empty());
    assert!(!watched.inhibits.is_empty());
    assert_eq!(alone.segments.len(), 60);
}

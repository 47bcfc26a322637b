use bearguard_core::eventlog::{read_event_log, write_event_log};
use bearguard_core::model::{EventKind, EventRecord};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

const KINDS: [EventKind; 4] = [
    EventKind::SegmentDecision,
    EventKind::SprayTriggered,
    EventKind::SprayInhibited,
    EventKind::BatteryLow,
];

fn random_value(rng: &mut ChaCha8Rng, depth: u32) -> Value {
    match rng.random_range(0..if depth > 1 { 5 } else { 7 }) {
        0 => Value::Null,
        1 => json!(rng.random::<bool>()),
        2 => json!(rng.random::<u32>()),
        3 => json!(rng.random::<f64>() * 1e4 - 5e3),
        4 => json!(format!("s{}\u{e9}\"\n", rng.random::<u16>())),
        5 => Value::Array(
            (0..rng.random_range(0..3))
                .map(|_| random_value(rng, depth + 1))
                .collect(),
        ),
        _ => {
            let mut m = serde_json::Map::new();
            for i in 0..rng.random_range(0..3) {
                m.insert(format!("k{i}"), random_value(rng, depth + 1));
            }
            Value::Object(m)
        }
    }
}

fn random_records(seed: u64, n: usize) -> Vec<EventRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = 0.0;
    (0..n)
        .map(|_| {
            t += rng.random::<f64>() * 3.0;
            let mut r = EventRecord::new(
                format!("unit-{:02}", rng.random_range(0..4)),
                t,
                KINDS[rng.random_range(0..4)],
            );
            for k in 0..rng.random_range(0..5) {
                r.payload.insert(
                    format!("key_{}", (k * 7 + 3) % 11),
                    random_value(&mut rng, 0),
                );
            }
            r
        })
        .collect()
}

#[test]
fn thousand_mixed_records_round_trip() {
    let records = random_records(42, 1000);
    let mut buf = Vec::new();
    let bytes = write_event_log(&records, &mut buf).unwrap();
    assert_eq!(bytes as usize, buf.len());
    assert_eq!(buf.iter().filter(|&&b| b == b'\n').count(), 1000);
    assert_eq!(read_event_log(buf.as_slice()).unwrap(), records);
}

proptest! {
    #[test]
    fn any_record_sequence_round_trips(seed in any::<u64>(), n in 0usize..40) {
        let records = random_records(seed, n);
        let mut buf = Vec::new();
        write_event_log(&records, &mut buf).unwrap();
        prop_assert_eq!(read_event_log(buf.as_slice()).unwrap(), records);
    }
}

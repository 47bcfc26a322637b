use bearguard_core::model::{
    BoundingBox, Detection, Frame, Lighting, ObjectClass, SegmentDecision,
};
use bearguard_core::segment::{classify_segment, FilterConfig};
use proptest::prelude::*;

fn detection() -> impl Strategy<Value = Detection> {
    (0usize..5, 0.0..=1.0f64).prop_map(|(c, conf)| {
        let b = BoundingBox::new(20.0, 20.0, 30.0, 30.0).unwrap();
        Detection::new(ObjectClass::ALL[c], conf, b).unwrap()
    })
}

fn frames() -> impl Strategy<Value = Vec<Frame>> {
    prop::collection::vec(prop::collection::vec(detection(), 0..4), 10).prop_map(|dets| {
        dets.into_iter()
            .enumerate()
            .map(|(i, d)| Frame::new(i as u64, i as f64 * 0.1, d, Lighting::Day).unwrap())
            .collect()
    })
}

fn with_detections(frame: &Frame, dets: Vec<Detection>) -> Frame {
    Frame::new(frame.index(), frame.timestamp(), dets, frame.lighting()).unwrap()
}

proptest! {
    #[test]
    fn raising_a_bear_confidence_never_clears_a_detection(
        fs in frames(), at in 0usize..10, boost in 0.0..=1.0f64
    ) {
        let cfg = FilterConfig::default();
        let before = classify_segment(&fs, &cfg).unwrap();
        let mut raised = fs.clone();
        let mut dets = raised[at].detections().to_vec();
        if let Some(d) = dets.iter_mut().find(|d| d.class() == ObjectClass::Bear) {
            let conf = (d.confidence() + boost).min(1.0);
            *d = Detection::new(ObjectClass::Bear, conf, *d.bbox()).unwrap();
        } else if dets.len() < 10 {
            dets.push(Detection::new(ObjectClass::Bear, boost, BoundingBox::new(1.0, 1.0, 5.0, 5.0).unwrap()).unwrap());
        }
        raised[at] = with_detections(&raised[at], dets);
        let after = classify_segment(&raised, &cfg).unwrap();
        prop_assert!(after.max_bear_confidence() >= before.max_bear_confidence());
        if before.is_bear() {
            prop_assert!(after.is_bear());
        }
    }

    #[test]
    fn frame_order_is_irrelevant(fs in frames(), rot in 0usize..10) {
        let cfg = FilterConfig::default();
        let mut permuted = fs.clone();
        permuted.rotate_left(rot);
        permuted.swap(0, 9);
        let a = classify_segment(&fs, &cfg).unwrap();
        let b = classify_segment(&permuted, &cfg).unwrap();
        prop_assert_eq!(a.decision(), b.decision());
        prop_assert_eq!(a.max_bear_confidence(), b.max_bear_confidence());
    }

    #[test]
    fn only_bears_can_trigger(fs in frames()) {
        let stripped: Vec<Frame> = fs
            .iter()
            .map(|f| {
                let dets = f.detections().iter().copied().filter(|d| d.class() != ObjectClass::Bear).collect();
                with_detections(f, dets)
            })
            .collect();
        let s = classify_segment(&stripped, &FilterConfig::default()).unwrap();
        prop_assert_eq!(s.decision(), SegmentDecision::NoBear);
        prop_assert_eq!(s.max_bear_confidence(), 0.0);
    }

    #[test]
    fn decision_is_max_against_threshold(fs in frames(), threshold in 0.01..=1.0f64) {
        let cfg = FilterConfig { bear_threshold: threshold, ..Default::default() };
        let s = classify_segment(&fs, &cfg).unwrap();
        let max = fs.iter().flat_map(|f| f.detections()).filter(|d| d.class() == ObjectClass::Bear)
            .map(|d| d.confidence()).fold(0.0, f64::max);
        prop_assert_eq!(s.max_bear_confidence(), max);
        prop_assert_eq!(s.is_bear(), max >= threshold);
    }
}

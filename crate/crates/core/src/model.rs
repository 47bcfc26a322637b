//! Value types shared by every stage of the pipeline.
//!
//! All geometry lives in the 224×224 model-input frame. Constructors validate
//! their invariants, so code holding one of these values can rely on it.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Side length of the square detection frame, in pixels.
pub const FRAME_SIZE: f64 = 224.0;

/// Maximum number of boxes a detector emits per frame.
pub const MAX_DETECTIONS_PER_FRAME: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawBox", into = "RawBox")]
pub struct BoundingBox {
    x: f64,
    y: f64,
    w: f64,
    h: f64,
}

#[derive(Serialize, Deserialize)]
struct RawBox {
    x: f64,
    y: f64,
    w: f64,
    h: f64,
}

impl TryFrom<RawBox> for BoundingBox {
    type Error = Error;

    fn try_from(raw: RawBox) -> Result<Self> {
        BoundingBox::new(raw.x, raw.y, raw.w, raw.h)
    }
}

impl From<BoundingBox> for RawBox {
    fn from(b: BoundingBox) -> Self {
        RawBox {
            x: b.x,
            y: b.y,
            w: b.w,
            h: b.h,
        }
    }
}

impl BoundingBox {
    pub fn new(x: f64, y: f64, w: f64, h: f64) -> Result<Self> {
        let fail = |reason| Err(Error::InvalidBox { x, y, w, h, reason });
        if ![x, y, w, h].iter().all(|v| v.is_finite()) {
            return fail("non-finite coordinate");
        }
        if w <= 0.0 || h <= 0.0 {
            return fail("width and height must be positive");
        }
        if x < 0.0 || y < 0.0 {
            return fail("origin outside frame");
        }
        if x + w > FRAME_SIZE || y + h > FRAME_SIZE {
            return fail("box extends past the 224x224 frame");
        }
        Ok(BoundingBox { x, y, w, h })
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn w(&self) -> f64 {
        self.w
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn right(&self) -> f64 {
        self.x + self.w
    }

    pub fn bottom(&self) -> f64 {
        self.y + self.h
    }

    pub fn area(&self) -> f64 {
        self.w * self.h
    }
}

/// Closed set of classes the detector knows about.
///
/// `Bear` drives the deterrent and `Human` inhibits it; the rest only matter
/// as sources of misidentification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ObjectClass {
    Bear,
    Human,
    Yak,
    TibetanMastiff,
    Other,
}

impl ObjectClass {
    pub const ALL: [ObjectClass; 5] = [
        ObjectClass::Bear,
        ObjectClass::Human,
        ObjectClass::Yak,
        ObjectClass::TibetanMastiff,
        ObjectClass::Other,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ObjectClass::Bear => "Bear",
            ObjectClass::Human => "Human",
            ObjectClass::Yak => "Yak",
            ObjectClass::TibetanMastiff => "TibetanMastiff",
            ObjectClass::Other => "Other",
        }
    }
}

impl fmt::Display for ObjectClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ObjectClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ObjectClass::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| Error::UnknownClass(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDetection")]
pub struct Detection {
    class: ObjectClass,
    confidence: f64,
    bbox: BoundingBox,
}

#[derive(Deserialize)]
struct RawDetection {
    class: ObjectClass,
    confidence: f64,
    bbox: BoundingBox,
}

impl TryFrom<RawDetection> for Detection {
    type Error = Error;

    fn try_from(raw: RawDetection) -> Result<Self> {
        Detection::new(raw.class, raw.confidence, raw.bbox)
    }
}

impl Detection {
    pub fn new(class: ObjectClass, confidence: f64, bbox: BoundingBox) -> Result<Self> {
        if !(0.0..=1.0).contains(&confidence) {
            return Err(Error::InvalidConfidence(confidence));
        }
        Ok(Detection {
            class,
            confidence,
            bbox,
        })
    }

    pub fn class(&self) -> ObjectClass {
        self.class
    }

    pub fn confidence(&self) -> f64 {
        self.confidence
    }

    pub fn bbox(&self) -> &BoundingBox {
        &self.bbox
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub enum Lighting {
    #[default]
    Day,
    Night,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    index: u64,
    timestamp: f64,
    detections: Vec<Detection>,
    lighting: Lighting,
}

impl Frame {
    pub fn new(
        index: u64,
        timestamp: f64,
        detections: Vec<Detection>,
        lighting: Lighting,
    ) -> Result<Self> {
        if detections.len() > MAX_DETECTIONS_PER_FRAME {
            return Err(Error::TooManyDetections {
                index,
                count: detections.len(),
                limit: MAX_DETECTIONS_PER_FRAME,
            });
        }
        if !timestamp.is_finite() || timestamp < 0.0 {
            return Err(Error::Config(format!(
                "frame {index} has invalid timestamp {timestamp}"
            )));
        }
        Ok(Frame {
            index,
            timestamp,
            detections,
            lighting,
        })
    }

    pub fn index(&self) -> u64 {
        self.index
    }

    pub fn timestamp(&self) -> f64 {
        self.timestamp
    }

    pub fn detections(&self) -> &[Detection] {
        &self.detections
    }

    pub fn lighting(&self) -> Lighting {
        self.lighting
    }

    /// Highest Bear confidence in the frame, 0 when there is none.
    pub fn max_confidence(&self, class: ObjectClass) -> f64 {
        self.detections
            .iter()
            .filter(|d| d.class == class)
            .map(|d| d.confidence)
            .fold(0.0, f64::max)
    }
}

/// An append-only frame sequence whose indices and timestamps strictly increase.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FrameStream {
    frames: Vec<Frame>,
}

impl FrameStream {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, frame: Frame) -> Result<()> {
        if let Some(prev) = self.frames.last() {
            if frame.index <= prev.index || frame.timestamp <= prev.timestamp {
                return Err(Error::NonMonotonicFrame {
                    index: frame.index,
                    timestamp: frame.timestamp,
                    prev_index: prev.index,
                    prev_timestamp: prev.timestamp,
                });
            }
        }
        self.frames.push(frame);
        Ok(())
    }

    pub fn from_frames(frames: Vec<Frame>) -> Result<Self> {
        let mut stream = FrameStream::new();
        for f in frames {
            stream.push(f)?;
        }
        Ok(stream)
    }

    pub fn frames(&self) -> &[Frame] {
        &self.frames
    }

    pub fn into_frames(self) -> Vec<Frame> {
        self.frames
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SegmentDecision {
    BearDetected,
    NoBear,
}

/// A classified window of consecutive frames. Built by
/// [`classify_segment`](crate::segment::classify_segment).
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub(crate) frames: Vec<Frame>,
    pub(crate) decision: SegmentDecision,
    pub(crate) max_bear_confidence: f64,
}

impl Segment {
    pub fn frames(&self) -> &[Frame] {
        &self.frames
    }

    pub fn decision(&self) -> SegmentDecision {
        self.decision
    }

    pub fn max_bear_confidence(&self) -> f64 {
        self.max_bear_confidence
    }

    pub fn is_bear(&self) -> bool {
        self.decision == SegmentDecision::BearDetected
    }

    /// Timestamp of the last frame, i.e. when the decision becomes available.
    pub fn end_time(&self) -> f64 {
        self.frames.last().map(Frame::timestamp).unwrap_or(0.0)
    }

    pub fn start_index(&self) -> u64 {
        self.frames.first().map(Frame::index).unwrap_or(0)
    }

    /// Whether any frame carries a detection of `class` at or above `threshold`.
    pub fn contains(&self, class: ObjectClass, threshold: f64) -> bool {
        self.frames
            .iter()
            .flat_map(|f| f.detections())
            .any(|d| d.class() == class && d.confidence() >= threshold)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EventKind {
    SegmentDecision,
    SprayTriggered,
    SprayInhibited,
    BatteryLow,
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            EventKind::SegmentDecision => "SegmentDecision",
            EventKind::SprayTriggered => "SprayTriggered",
            EventKind::SprayInhibited => "SprayInhibited",
            EventKind::BatteryLow => "BatteryLow",
        };
        f.write_str(s)
    }
}

pub type Payload = serde_json::Map<String, serde_json::Value>;

/// One line of the device event log. Field order is the on-disk key order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventRecord {
    pub device_id: String,
    pub timestamp: f64,
    pub kind: EventKind,
    #[serde(default)]
    pub payload: Payload,
}

impl EventRecord {
    pub fn new(device_id: impl Into<String>, timestamp: f64, kind: EventKind) -> Self {
        EventRecord {
            device_id: device_id.into(),
            timestamp,
            kind,
            payload: Payload::new(),
        }
    }

    pub fn with(mut self, key: &str, value: impl Into<serde_json::Value>) -> Self {
        self.payload.insert(key.to_string(), value.into());
        self
    }

    pub fn payload_f64(&self, key: &str) -> Option<f64> {
        self.payload.get(key).and_then(serde_json::Value::as_f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bbox_rejects_out_of_frame() {
        assert!(BoundingBox::new(0.0, 0.0, 224.0, 224.0).is_ok());
        assert!(BoundingBox::new(200.0, 0.0, 100.0, 10.0).is_err());
        assert!(BoundingBox::new(-1.0, 0.0, 10.0, 10.0).is_err());
        assert!(BoundingBox::new(0.0, 0.0, 0.0, 10.0).is_err());
        assert!(BoundingBox::new(0.0, f64::NAN, 1.0, 10.0).is_err());
    }

    #[test]
    fn bbox_deserialize_validates() {
        let ok: BoundingBox = serde_json::from_str(r#"{"x":1,"y":2,"w":3,"h":4}"#).unwrap();
        assert_eq!(ok.area(), 12.0);
        assert!(serde_json::from_str::<BoundingBox>(r#"{"x":100,"y":2,"w":300,"h":4}"#).is_err());
    }

    #[test]
    fn confidence_bounds() {
        let b = BoundingBox::new(0.0, 0.0, 1.0, 1.0).unwrap();
        assert!(Detection::new(ObjectClass::Bear, 1.0, b).is_ok());
        assert!(Detection::new(ObjectClass::Bear, 1.01, b).is_err());
        assert!(Detection::new(ObjectClass::Bear, -0.1, b).is_err());
    }

    #[test]
    fn class_names_round_trip() {
        for c in ObjectClass::ALL {
            assert_eq!(c.as_str().parse::<ObjectClass>().unwrap(), c);
        }
        assert!(matches!(
            "Wolf".parse::<ObjectClass>(),
            Err(Error::UnknownClass(s)) if s == "Wolf"
        ));
    }

    #[test]
    fn frame_limits_detections() {
        let b = BoundingBox::new(0.0, 0.0, 1.0, 1.0).unwrap();
        let d = Detection::new(ObjectClass::Yak, 0.5, b).unwrap();
        assert!(Frame::new(0, 0.0, vec![d; 10], Lighting::Day).is_ok());
        assert!(matches!(
            Frame::new(0, 0.0, vec![d; 11], Lighting::Day),
            Err(Error::TooManyDetections { count: 11, .. })
        ));
    }

    #[test]
    fn stream_rejects_non_increasing_time() {
        let mut s = FrameStream::new();
        s.push(Frame::new(0, 0.0, vec![], Lighting::Day).unwrap())
            .unwrap();
        s.push(Frame::new(1, 0.1, vec![], Lighting::Day).unwrap())
            .unwrap();
        let err = s.push(Frame::new(2, 0.1, vec![], Lighting::Day).unwrap());
        assert!(matches!(
            err,
            Err(Error::NonMonotonicFrame { index: 2, .. })
        ));
        let err = s.push(Frame::new(1, 0.2, vec![], Lighting::Day).unwrap());
        assert!(err.is_err());
        assert_eq!(s.len(), 2);
    }
}

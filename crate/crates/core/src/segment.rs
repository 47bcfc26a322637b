//! Video-segment decision rule: a window of frames is a bear sighting when
//! at least one frame holds a Bear detection at or above the threshold.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Frame, ObjectClass, Segment, SegmentDecision};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Windowing {
    #[default]
    Tumbling,
    Sliding,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FilterConfig {
    pub segment_length: usize,
    pub bear_threshold: f64,
    pub windowing: Windowing,
}

impl Default for FilterConfig {
    fn default() -> Self {
        FilterConfig {
            segment_length: 10,
            bear_threshold: 0.70,
            windowing: Windowing::Tumbling,
        }
    }
}

impl FilterConfig {
    pub fn validate(&self) -> Result<()> {
        if self.segment_length == 0 {
            return Err(Error::Config("segment_length must be at least 1".into()));
        }
        if !(self.bear_threshold > 0.0 && self.bear_threshold <= 1.0) {
            return Err(Error::Config(format!(
                "bear_threshold {} outside (0, 1]",
                self.bear_threshold
            )));
        }
        Ok(())
    }
}

/// Classifies exactly `cfg.segment_length` frames. A confidence equal to the
/// threshold counts as a detection.
pub fn classify_segment(frames: &[Frame], cfg: &FilterConfig) -> Result<Segment> {
    cfg.validate()?;
    if frames.len() != cfg.segment_length {
        return Err(Error::SegmentLength {
            expected: cfg.segment_length,
            actual: frames.len(),
        });
    }
    let max_bear_confidence = frames
        .iter()
        .map(|f| f.max_confidence(ObjectClass::Bear))
        .fold(0.0, f64::max);
    let decision = if max_bear_confidence >= cfg.bear_threshold {
        SegmentDecision::BearDetected
    } else {
        SegmentDecision::NoBear
    };
    Ok(Segment {
        frames: frames.to_vec(),
        decision,
        max_bear_confidence,
    })
}

/// Splits a frame stream into classified segments.
///
/// Tumbling windows drop a trailing partial window; sliding windows emit one
/// segment per frame from position `segment_length - 1` on.
pub fn segment_stream(frames: &[Frame], cfg: &FilterConfig) -> Result<Vec<Segment>> {
    cfg.validate()?;
    let n = cfg.segment_length;
    match cfg.windowing {
        Windowing::Tumbling => frames
            .chunks_exact(n)
            .map(|w| classify_segment(w, cfg))
            .collect(),
        Windowing::Sliding => frames
            .windows(n)
            .map(|w| classify_segment(w, cfg))
            .collect(),
    }
}

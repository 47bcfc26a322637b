//! Monte-Carlo estimate of how often a non-bear animal in view turns a whole
//! segment into a bear sighting.

use serde::{Deserialize, Serialize};

use super::camera::CameraSpec;
use super::scenario::{DetectorProfile, EntityTrack, Scenario, Waypoint};
use crate::error::{Error, Result};
use crate::model::{Lighting, ObjectClass};
use crate::segment::{classify_segment, FilterConfig};

/// Probability that at least one of `segment_length` independent frames
/// misfires with per-frame probability `p`.
pub fn segment_rate_closed_form(p: f64, segment_length: usize) -> f64 {
    1.0 - (1.0 - p).powi(segment_length as i32)
}

/// Per-frame misfire probability that yields segment rate `rate`.
pub fn per_frame_rate_for(rate: f64, segment_length: usize) -> f64 {
    1.0 - (1.0 - rate).powf(1.0 / segment_length as f64)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct MisidTally {
    pub segments: u64,
    pub bear_detected: u64,
}

impl MisidTally {
    pub fn merge(self, other: MisidTally) -> MisidTally {
        MisidTally {
            segments: self.segments + other.segments,
            bear_detected: self.bear_detected + other.bear_detected,
        }
    }

    pub fn rate(&self) -> f64 {
        if self.segments == 0 {
            0.0
        } else {
            self.bear_detected as f64 / self.segments as f64
        }
    }

    /// Binomial standard error of [`rate`](Self::rate) around the true
    /// probability `p`.
    pub fn standard_error(&self, p: f64) -> f64 {
        (p * (1.0 - p) / self.segments as f64).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MisidExperiment {
    pub class: ObjectClass,
    /// Per-frame probability of a confused Bear report.
    pub per_frame_misfire: f64,
    pub segments: u64,
    pub batches: u64,
    pub seed: u64,
    #[serde(default)]
    pub filter: FilterConfig,
    #[serde(default)]
    pub camera: CameraSpec,
}

impl MisidExperiment {
    /// A single stationary animal on the optical axis for `segments` tumbling
    /// windows.
    fn batch_scenario(&self, segments: u64) -> Scenario {
        let frames = segments * self.filter.segment_length as u64;
        let duration = frames as f64 / self.camera.frame_rate;
        let mut detector = DetectorProfile {
            seed: self.seed,
            ..Default::default()
        };
        detector
            .confusion
            .insert(self.class, self.per_frame_misfire);
        Scenario {
            camera: self.camera,
            tracks: vec![EntityTrack {
                entity_class: self.class,
                waypoints: vec![
                    Waypoint {
                        time: 0.0,
                        x: 10.0,
                        y: 0.0,
                    },
                    Waypoint {
                        time: duration,
                        x: 10.0,
                        y: 0.0,
                    },
                ],
                size: 1.5,
            }],
            duration,
            lighting: Lighting::Day,
            detector,
        }
    }

    fn run_batch(&self, batch: u64, segments: u64) -> Result<MisidTally> {
        let scenario = self.batch_scenario(segments);
        let mut frames = scenario.renderer_on_stream(batch)?.map(|r| r.frame);
        let n = self.filter.segment_length;
        let mut window = Vec::with_capacity(n);
        let mut tally = MisidTally::default();
        loop {
            window.clear();
            window.extend(frames.by_ref().take(n));
            if window.len() < n {
                break;
            }
            tally.segments += 1;
            if classify_segment(&window, &self.filter)?.is_bear() {
                tally.bear_detected += 1;
            }
        }
        Ok(tally)
    }

    /// Runs the batches (in parallel when built with the `parallel` feature)
    /// and sums them. Batch `b` draws from ChaCha stream `b` of the seed, so
    /// the result does not depend on scheduling.
    pub fn run(&self) -> Result<MisidTally> {
        if self.class == ObjectClass::Bear {
            return Err(Error::Config(
                "misidentification needs a non-bear class".into(),
            ));
        }
        if self.batches == 0 {
            return Err(Error::Config("batches must be at least 1".into()));
        }
        self.filter.validate()?;
        let sizes: Vec<(u64, u64)> = (0..self.batches)
            .map(|b| {
                let base = self.segments / self.batches;
                let extra = u64::from(b < self.segments % self.batches);
                (b, base + extra)
            })
            .collect();

        #[cfg(feature = "parallel")]
        let tallies: Vec<Result<MisidTally>> = {
            use rayon::prelude::*;
            sizes
                .par_iter()
                .map(|&(b, n)| self.run_batch(b, n))
                .collect()
        };
        #[cfg(not(feature = "parallel"))]
        let tallies: Vec<Result<MisidTally>> =
            sizes.iter().map(|&(b, n)| self.run_batch(b, n)).collect();

        tallies
            .into_iter()
            .try_fold(MisidTally::default(), |acc, t| Ok(acc.merge(t?)))
    }
}

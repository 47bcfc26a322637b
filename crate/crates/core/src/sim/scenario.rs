use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::camera::CameraSpec;
use crate::error::{Error, Result};
use crate::model::{Detection, Frame, Lighting, ObjectClass, MAX_DETECTIONS_PER_FRAME};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Waypoint {
    /// s
    pub time: f64,
    /// m
    pub x: f64,
    /// m
    pub y: f64,
}

/// Piecewise-linear ground track. The entity exists only between its first
/// and last waypoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntityTrack {
    pub entity_class: ObjectClass,
    pub waypoints: Vec<Waypoint>,
    /// Nominal body length, meters.
    #[serde(default = "default_size")]
    pub size: f64,
}

fn default_size() -> f64 {
    1.5
}

impl EntityTrack {
    pub fn validate(&self) -> Result<()> {
        if self.waypoints.is_empty() {
            return Err(Error::Config("track without waypoints".into()));
        }
        if self.waypoints.windows(2).any(|w| w[1].time <= w[0].time) {
            return Err(Error::Config(
                "waypoint times must strictly increase".into(),
            ));
        }
        if !(self.size.is_finite() && self.size > 0.0) {
            return Err(Error::Config(format!(
                "entity size {} must be positive",
                self.size
            )));
        }
        Ok(())
    }

    pub fn position_at(&self, t: f64) -> Option<(f64, f64)> {
        let first = self.waypoints.first()?;
        let last = self.waypoints.last()?;
        if t < first.time || t > last.time {
            return None;
        }
        let i = self.waypoints.partition_point(|w| w.time <= t);
        if i == self.waypoints.len() {
            return Some((last.x, last.y));
        }
        let (a, b) = (&self.waypoints[i - 1], &self.waypoints[i]);
        let s = (t - a.time) / (b.time - a.time);
        Some((a.x + s * (b.x - a.x), a.y + s * (b.y - a.y)))
    }
}

/// Normal distribution truncated to an interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceDist {
    pub mean: f64,
    pub spread: f64,
}

impl Default for ConfidenceDist {
    fn default() -> Self {
        ConfidenceDist {
            mean: 0.85,
            spread: 0.1,
        }
    }
}

impl ConfidenceDist {
    fn sample<R: Rng>(&self, rng: &mut R, lo: f64, hi: f64) -> f64 {
        if self.spread <= 0.0 {
            return self.mean.clamp(lo, hi);
        }
        let normal = Normal::new(self.mean, self.spread).expect("validated spread");
        for _ in 0..64 {
            let v = normal.sample(rng);
            if (lo..=hi).contains(&v) {
                return v;
            }
        }
        // Interval far in the tail; fall back to uniform over it.
        rng.random_range(lo..=hi)
    }
}

/// Synthetic per-frame detector. Every visible entity is sampled
/// independently in every frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DetectorProfile {
    /// Probability of reporting a visible entity under its true class.
    pub true_positive_rate: f64,
    /// Per class, probability of also reporting a Bear for that entity.
    pub confusion: BTreeMap<ObjectClass, f64>,
    pub confidence_distributions: BTreeMap<ObjectClass, ConfidenceDist>,
    /// Confidence of confused Bear reports, truncated to
    /// `[misfire_floor, 1]`.
    pub misfire_confidence: ConfidenceDist,
    pub misfire_floor: f64,
    /// Multiplier on the true-positive rate at night.
    pub night_degradation: f64,
    pub seed: u64,
}

impl Default for DetectorProfile {
    fn default() -> Self {
        DetectorProfile {
            true_positive_rate: 0.9,
            confusion: BTreeMap::new(),
            confidence_distributions: BTreeMap::new(),
            misfire_confidence: ConfidenceDist {
                mean: 0.75,
                spread: 0.05,
            },
            misfire_floor: 0.70,
            night_degradation: 0.8,
            seed: 0,
        }
    }
}

fn probability(name: &str, p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::Config(format!("{name} = {p} outside [0, 1]")))
    }
}

impl DetectorProfile {
    pub fn validate(&self) -> Result<()> {
        probability("true_positive_rate", self.true_positive_rate)?;
        for (c, p) in &self.confusion {
            probability(&format!("confusion[{c}]"), *p)?;
        }
        probability("misfire_floor", self.misfire_floor)?;
        if !(self.night_degradation > 0.0 && self.night_degradation <= 1.0) {
            return Err(Error::Config(format!(
                "night_degradation {} outside (0, 1]",
                self.night_degradation
            )));
        }
        for d in self
            .confidence_distributions
            .values()
            .chain(std::iter::once(&self.misfire_confidence))
        {
            if !(d.mean.is_finite() && d.spread.is_finite() && d.spread >= 0.0) {
                return Err(Error::Config(format!(
                    "bad confidence distribution mean={} spread={}",
                    d.mean, d.spread
                )));
            }
        }
        Ok(())
    }

    fn effective_tpr(&self, lighting: Lighting) -> f64 {
        match lighting {
            Lighting::Day => self.true_positive_rate,
            Lighting::Night => self.true_positive_rate * self.night_degradation,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    #[serde(default)]
    pub camera: CameraSpec,
    #[serde(default)]
    pub tracks: Vec<EntityTrack>,
    /// s
    pub duration: f64,
    #[serde(default)]
    pub lighting: Lighting,
    #[serde(default)]
    pub detector: DetectorProfile,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        if !(self.duration.is_finite() && self.duration > 0.0) {
            return Err(Error::Config(format!(
                "duration {} must be positive",
                self.duration
            )));
        }
        self.camera.validate()?;
        self.detector.validate()?;
        for t in &self.tracks {
            t.validate()?;
            if t.waypoints
                .iter()
                .any(|w| w.time < 0.0 || w.time > self.duration)
            {
                return Err(Error::Config(format!(
                    "{} track has waypoints outside [0, {}]",
                    t.entity_class, self.duration
                )));
            }
        }
        Ok(())
    }

    pub fn frame_count(&self) -> u64 {
        (self.duration * self.camera.frame_rate).round() as u64
    }

    /// Streaming renderer over the scenario.
    pub fn renderer(&self) -> Result<FrameRenderer<'_>> {
        self.renderer_on_stream(0)
    }

    /// Renderer drawing from an independent ChaCha stream of the same seed.
    pub fn renderer_on_stream(&self, stream: u64) -> Result<FrameRenderer<'_>> {
        self.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(self.detector.seed);
        rng.set_stream(stream);
        Ok(FrameRenderer {
            scenario: self,
            rng,
            next: 0,
            total: self.frame_count(),
        })
    }
}

/// A frame as the detector saw it, plus what was really in view.
#[derive(Debug, Clone, PartialEq)]
pub struct RenderedFrame {
    pub frame: Frame,
    /// One confidence-1 detection per visible entity.
    pub truth: Vec<Detection>,
}

pub struct FrameRenderer<'a> {
    scenario: &'a Scenario,
    rng: ChaCha8Rng,
    next: u64,
    total: u64,
}

impl FrameRenderer<'_> {
    fn render(&mut self, index: u64) -> RenderedFrame {
        let sc = self.scenario;
        let det = &sc.detector;
        let t = index as f64 / sc.camera.frame_rate;
        let tpr = det.effective_tpr(sc.lighting);

        let mut detections = Vec::new();
        let mut truth = Vec::new();
        for track in &sc.tracks {
            let Some(bbox) = track
                .position_at(t)
                .and_then(|pos| sc.camera.project(pos, track.size))
            else {
                continue;
            };
            let class = track.entity_class;
            truth.push(Detection::new(class, 1.0, bbox).expect("unit confidence"));

            if self.rng.random::<f64>() < tpr {
                let dist = det
                    .confidence_distributions
                    .get(&class)
                    .copied()
                    .unwrap_or_default();
                let conf = dist.sample(&mut self.rng, 0.0, 1.0);
                detections.push(Detection::new(class, conf, bbox).expect("truncated to [0, 1]"));
            }
            if class != ObjectClass::Bear {
                let p = det.confusion.get(&class).copied().unwrap_or(0.0);
                if p > 0.0 && self.rng.random::<f64>() < p {
                    let conf = det
                        .misfire_confidence
                        .sample(&mut self.rng, det.misfire_floor, 1.0);
                    detections.push(
                        Detection::new(ObjectClass::Bear, conf, bbox).expect("truncated to [0, 1]"),
                    );
                }
            }
        }

        if detections.len() > MAX_DETECTIONS_PER_FRAME {
            detections.sort_by(|a, b| b.confidence().total_cmp(&a.confidence()));
            detections.truncate(MAX_DETECTIONS_PER_FRAME);
        }
        let frame = Frame::new(index, t, detections, sc.lighting).expect("capped detections");
        RenderedFrame { frame, truth }
    }
}

impl Iterator for FrameRenderer<'_> {
    type Item = RenderedFrame;

    fn next(&mut self) -> Option<RenderedFrame> {
        if self.next >= self.total {
            return None;
        }
        let index = self.next;
        self.next += 1;
        Some(self.render(index))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.total - self.next) as usize;
        (left, Some(left))
    }
}

/// All frames of a scenario as seen by the synthetic detector.
pub fn render_frames(scenario: &Scenario) -> Result<Vec<Frame>> {
    Ok(scenario.renderer()?.map(|r| r.frame).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stationary(class: ObjectClass, x: f64, y: f64, duration: f64) -> EntityTrack {
        EntityTrack {
            entity_class: class,
            waypoints: vec![
                Waypoint { time: 0.0, x, y },
                Waypoint {
                    time: duration,
                    x,
                    y,
                },
            ],
            size: 1.5,
        }
    }

    #[test]
    fn interpolates_between_waypoints() {
        let t = EntityTrack {
            entity_class: ObjectClass::Bear,
            waypoints: vec![
                Waypoint {
                    time: 1.0,
                    x: 0.0,
                    y: 0.0,
                },
                Waypoint {
                    time: 3.0,
                    x: 10.0,
                    y: -4.0,
                },
                Waypoint {
                    time: 4.0,
                    x: 10.0,
                    y: 0.0,
                },
            ],
            size: 1.8,
        };
        assert_eq!(t.position_at(0.5), None);
        assert_eq!(t.position_at(2.0), Some((5.0, -2.0)));
        assert_eq!(t.position_at(3.0), Some((10.0, -4.0)));
        assert_eq!(t.position_at(4.0), Some((10.0, 0.0)));
        assert_eq!(t.position_at(4.1), None);
    }

    #[test]
    fn frame_count_and_timestamps() {
        let sc = Scenario {
            camera: CameraSpec::default(),
            tracks: vec![],
            duration: 2.5,
            lighting: Lighting::Day,
            detector: DetectorProfile::default(),
        };
        let frames = render_frames(&sc).unwrap();
        assert_eq!(frames.len(), 25);
        assert!(frames.iter().all(|f| f.detections().is_empty()));
        assert_eq!(frames[24].timestamp(), 2.4);
    }

    #[test]
    fn certain_detector_sees_every_frame() {
        let sc = Scenario {
            camera: CameraSpec::default(),
            tracks: vec![stationary(ObjectClass::Bear, 10.0, 0.0, 5.0)],
            duration: 5.0,
            lighting: Lighting::Day,
            detector: DetectorProfile {
                true_positive_rate: 1.0,
                ..Default::default()
            },
        };
        let frames = render_frames(&sc).unwrap();
        assert_eq!(frames.len(), 50);
        assert!(frames.iter().all(|f| f
            .detections()
            .iter()
            .any(|d| d.class() == ObjectClass::Bear)));
    }

    #[test]
    fn out_of_range_entity_is_never_detected() {
        let mut detector = DetectorProfile {
            true_positive_rate: 1.0,
            ..Default::default()
        };
        detector.confusion.insert(ObjectClass::Yak, 1.0);
        let sc = Scenario {
            camera: CameraSpec::default(),
            tracks: vec![
                stationary(ObjectClass::Bear, 30.0, 0.0, 5.0),
                stationary(ObjectClass::Yak, 0.0, 5.0, 5.0),
            ],
            duration: 5.0,
            lighting: Lighting::Day,
            detector,
        };
        let rendered: Vec<_> = sc.renderer().unwrap().collect();
        assert!(rendered
            .iter()
            .all(|r| r.frame.detections().is_empty() && r.truth.is_empty()));
    }

    #[test]
    fn misfires_respect_the_floor() {
        let mut detector = DetectorProfile {
            true_positive_rate: 0.0,
            ..Default::default()
        };
        detector.confusion.insert(ObjectClass::Yak, 1.0);
        let sc = Scenario {
            camera: CameraSpec::default(),
            tracks: vec![stationary(ObjectClass::Yak, 8.0, 1.0, 20.0)],
            duration: 20.0,
            lighting: Lighting::Night,
            detector,
        };
        for f in render_frames(&sc).unwrap() {
            assert_eq!(f.detections().len(), 1);
            assert!(f.detections()[0].confidence() >= 0.70);
            assert_eq!(f.lighting(), Lighting::Night);
        }
    }

    #[test]
    fn crowded_frames_are_capped() {
        let tracks = (0..12)
            .map(|i| stationary(ObjectClass::Yak, 10.0, i as f64 * 0.5 - 3.0, 1.0))
            .collect();
        let sc = Scenario {
            camera: CameraSpec::default(),
            tracks,
            duration: 1.0,
            lighting: Lighting::Day,
            detector: DetectorProfile {
                true_positive_rate: 1.0,
                ..Default::default()
            },
        };
        let frames = render_frames(&sc).unwrap();
        assert!(frames
            .iter()
            .all(|f| f.detections().len() == MAX_DETECTIONS_PER_FRAME));
    }

    #[test]
    fn same_seed_same_frames() {
        let sc = Scenario {
            camera: CameraSpec::default(),
            tracks: vec![stationary(ObjectClass::Bear, 10.0, 2.0, 10.0)],
            duration: 10.0,
            lighting: Lighting::Day,
            detector: DetectorProfile {
                seed: 7,
                ..Default::default()
            },
        };
        assert_eq!(render_frames(&sc).unwrap(), render_frames(&sc).unwrap());
        let mut other = sc.clone();
        other.detector.seed = 8;
        assert_ne!(render_frames(&sc).unwrap(), render_frames(&other).unwrap());
    }

    #[test]
    fn validation() {
        let mut sc = Scenario {
            camera: CameraSpec::default(),
            tracks: vec![stationary(ObjectClass::Bear, 10.0, 2.0, 10.0)],
            duration: 5.0,
            lighting: Lighting::Day,
            detector: DetectorProfile::default(),
        };
        assert!(sc.validate().is_err());
        sc.duration = 10.0;
        assert!(sc.validate().is_ok());
        sc.detector.night_degradation = 0.0;
        assert!(sc.validate().is_err());
    }
}

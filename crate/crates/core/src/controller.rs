//! Spray actuation state machine.
//!
//! A bear segment fires the spray when the controller is idle, no human is in
//! view and the canister is not empty. Each spray is followed by a cooldown.
//! Triggering is deterministic: hardware misfires are not modelled here.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{EventKind, EventRecord, ObjectClass, Segment, SegmentDecision};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ControllerConfig {
    /// Maximum allowed delay between a bear decision and the spray, seconds.
    pub trigger_latency_budget: f64,
    pub spray_duration: f64,
    pub cooldown: f64,
    pub human_inhibit: bool,
    pub canister_total_sprays: u32,
    /// Fixed delay from decision to valve opening, seconds.
    pub actuation_delay: f64,
    /// Minimum Human confidence in a segment that counts as a person present.
    pub human_threshold: f64,
    pub device_id: String,
}

impl Default for ControllerConfig {
    fn default() -> Self {
        ControllerConfig {
            trigger_latency_budget: 0.2,
            spray_duration: 1.0,
            cooldown: 30.0,
            human_inhibit: true,
            canister_total_sprays: 20,
            actuation_delay: 0.05,
            human_threshold: 0.5,
            device_id: "unit-01".to_string(),
        }
    }
}

impl ControllerConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("trigger_latency_budget", self.trigger_latency_budget),
            ("spray_duration", self.spray_duration),
            ("cooldown", self.cooldown),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if self.canister_total_sprays == 0 {
            return Err(Error::Config(
                "canister_total_sprays must be at least 1".into(),
            ));
        }
        if !(self.actuation_delay >= 0.0 && self.actuation_delay <= self.trigger_latency_budget) {
            return Err(Error::Config(format!(
                "actuation_delay {} must lie in [0, trigger_latency_budget = {}]",
                self.actuation_delay, self.trigger_latency_budget
            )));
        }
        if !(0.0..=1.0).contains(&self.human_threshold) {
            return Err(Error::Config(format!(
                "human_threshold {} outside [0, 1]",
                self.human_threshold
            )));
        }
        Ok(())
    }

    /// Whether `segment` shows a person under this configuration.
    pub fn human_in(&self, segment: &Segment) -> bool {
        segment.contains(ObjectClass::Human, self.human_threshold)
    }
}

/// Physical description of the deterrent canister and nozzle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CanisterSpec {
    pub capsaicin_fraction: f64,
    pub menthol_fraction: f64,
    /// MPa
    pub pressure: f64,
    /// meters
    pub range: f64,
}

impl Default for CanisterSpec {
    fn default() -> Self {
        CanisterSpec {
            capsaicin_fraction: 0.03,
            menthol_fraction: 0.015,
            pressure: 2.8,
            range: 13.0,
        }
    }
}

impl CanisterSpec {
    pub fn validate(&self) -> Result<()> {
        if !(0.02..=0.05).contains(&self.capsaicin_fraction) {
            return Err(Error::Config(format!(
                "capsaicin fraction {} outside [0.02, 0.05]",
                self.capsaicin_fraction
            )));
        }
        if !(0.01..=0.02).contains(&self.menthol_fraction) {
            return Err(Error::Config(format!(
                "menthol fraction {} outside [0.01, 0.02]",
                self.menthol_fraction
            )));
        }
        if !(self.pressure > 0.0 && self.pressure <= 2.8) {
            return Err(Error::Config(format!(
                "pressure {} MPa outside (0, 2.8]",
                self.pressure
            )));
        }
        if !(self.range > 0.0 && self.range <= 13.0) {
            return Err(Error::Config(format!(
                "range {} m outside (0, 13]",
                self.range
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    Idle,
    Spraying,
    Cooldown,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControllerState {
    pub mode: Mode,
    pub sprays_remaining: u32,
    pub last_trigger_time: Option<f64>,
    last_step_time: Option<f64>,
}

impl ControllerState {
    pub fn new(cfg: &ControllerConfig) -> Self {
        ControllerState {
            mode: Mode::Idle,
            sprays_remaining: cfg.canister_total_sprays,
            last_trigger_time: None,
            last_step_time: None,
        }
    }

    fn mode_at(&self, now: f64, cfg: &ControllerConfig) -> Mode {
        match self.last_trigger_time {
            None => Mode::Idle,
            Some(t) if now < t + cfg.spray_duration => Mode::Spraying,
            Some(t) if now < t + cfg.spray_duration + cfg.cooldown => Mode::Cooldown,
            Some(_) => Mode::Idle,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SprayEvent {
    pub trigger_time: f64,
    pub decision_time: f64,
    pub duration: f64,
    pub sprays_remaining_after: u32,
}

impl SprayEvent {
    pub fn latency(&self) -> f64 {
        self.trigger_time - self.decision_time
    }

    pub fn to_record(&self, device_id: &str) -> EventRecord {
        EventRecord::new(device_id, self.decision_time, EventKind::SprayTriggered)
            .with("trigger_time", self.trigger_time)
            .with("decision_time", self.decision_time)
            .with("duration", self.duration)
            .with("sprays_remaining_after", self.sprays_remaining_after)
    }

    /// Recovers the spray from a `SprayTriggered` log record.
    pub fn from_record(record: &EventRecord) -> Option<SprayEvent> {
        if record.kind != EventKind::SprayTriggered {
            return None;
        }
        Some(SprayEvent {
            trigger_time: record.payload_f64("trigger_time")?,
            decision_time: record.payload_f64("decision_time")?,
            duration: record.payload_f64("duration")?,
            sprays_remaining_after: record
                .payload
                .get("sprays_remaining_after")?
                .as_u64()?
                .try_into()
                .ok()?,
        })
    }
}

/// Advances the controller to `now` and feeds it one classified segment.
pub fn step(
    state: &ControllerState,
    segment: &Segment,
    human_present: bool,
    now: f64,
    cfg: &ControllerConfig,
) -> Result<(ControllerState, Option<EventRecord>)> {
    if let Some(last) = state.last_step_time {
        if now <= last {
            return Err(Error::TimeRewind { now, last });
        }
    }
    let mut next = state.clone();
    next.last_step_time = Some(now);
    next.mode = state.mode_at(now, cfg);

    if segment.decision() != SegmentDecision::BearDetected {
        return Ok((next, None));
    }
    if human_present && cfg.human_inhibit {
        let record = EventRecord::new(&cfg.device_id, now, EventKind::SprayInhibited)
            .with("decision_time", now)
            .with("reason", "human_present")
            .with("max_bear_confidence", segment.max_bear_confidence());
        return Ok((next, Some(record)));
    }
    if next.mode != Mode::Idle || next.sprays_remaining == 0 {
        return Ok((next, None));
    }

    let trigger_time = now + cfg.actuation_delay;
    let spray = SprayEvent {
        trigger_time,
        decision_time: now,
        duration: cfg.spray_duration,
        sprays_remaining_after: next.sprays_remaining - 1,
    };
    if spray.latency() > cfg.trigger_latency_budget {
        return Err(Error::Config(format!(
            "trigger latency {} exceeds budget {}",
            spray.latency(),
            cfg.trigger_latency_budget
        )));
    }
    next.sprays_remaining -= 1;
    next.last_trigger_time = Some(trigger_time);
    next.mode = Mode::Spraying;
    Ok((next, Some(spray.to_record(&cfg.device_id))))
}

/// One controller input: a segment decided at `time`.
#[derive(Debug, Clone)]
pub struct TimelineEntry {
    pub time: f64,
    pub segment: Segment,
    pub human_present: bool,
}

/// Folds [`step`] over a timeline, returning the emitted events and the final
/// state.
pub fn run_timeline(
    entries: &[TimelineEntry],
    cfg: &ControllerConfig,
) -> Result<(Vec<EventRecord>, ControllerState)> {
    cfg.validate()?;
    let mut state = ControllerState::new(cfg);
    let mut events = Vec::new();
    for e in entries {
        let (next, event) = step(&state, &e.segment, e.human_present, e.time, cfg)?;
        state = next;
        events.extend(event);
    }
    Ok((events, state))
}

//! Battery energy budget under device draw and solar harvest.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const SECONDS_PER_DAY: f64 = 86_400.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PowerConfig {
    /// mAh
    pub battery_capacity: f64,
    /// V
    pub nominal_voltage: f64,
    /// W
    pub panel_rating: f64,
    /// Mean fraction of the panel rating delivered over 24 h.
    pub harvest_derating: f64,
    /// mW
    pub draw_active: f64,
    /// mW
    pub draw_idle: f64,
    pub duty_cycle_active: f64,
}

impl Default for PowerConfig {
    fn default() -> Self {
        PowerConfig {
            battery_capacity: 11_000.0,
            nominal_voltage: 3.7,
            panel_rating: 1.0,
            harvest_derating: 0.15,
            draw_active: 500.0,
            draw_idle: 200.0,
            duty_cycle_active: 1.0,
        }
    }
}

impl PowerConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("battery_capacity", self.battery_capacity),
            ("nominal_voltage", self.nominal_voltage),
            ("panel_rating", self.panel_rating),
            ("harvest_derating", self.harvest_derating),
            ("draw_active", self.draw_active),
            ("draw_idle", self.draw_idle),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if self.draw_idle > self.draw_active {
            return Err(Error::Config(format!(
                "draw_idle {} mW exceeds draw_active {} mW",
                self.draw_idle, self.draw_active
            )));
        }
        if !(0.0..=1.0).contains(&self.duty_cycle_active) {
            return Err(Error::Config(format!(
                "duty_cycle_active {} outside [0, 1]",
                self.duty_cycle_active
            )));
        }
        Ok(())
    }

    /// Time-averaged device draw, mW.
    pub fn average_draw_mw(&self) -> f64 {
        self.duty_cycle_active * self.draw_active + (1.0 - self.duty_cycle_active) * self.draw_idle
    }

    /// 24 h average solar harvest, mW.
    pub fn average_harvest_mw(&self) -> f64 {
        self.panel_rating * self.harvest_derating * 1000.0
    }
}

pub fn capacity_wh(cfg: &PowerConfig) -> f64 {
    cfg.battery_capacity * cfg.nominal_voltage / 1000.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind", content = "days")]
pub enum Runtime {
    Finite(f64),
    /// Harvest covers the draw; the battery never empties.
    Unbounded,
}

impl Runtime {
    pub fn days(&self) -> Option<f64> {
        match self {
            Runtime::Finite(d) => Some(*d),
            Runtime::Unbounded => None,
        }
    }

    pub fn at_least(&self, days: f64) -> bool {
        self.days().is_none_or(|d| d >= days)
    }
}

/// Days from full charge to empty at average draw and harvest.
pub fn runtime_days(cfg: &PowerConfig, solar_enabled: bool) -> Runtime {
    let draw = cfg.average_draw_mw();
    let harvest = if solar_enabled {
        cfg.average_harvest_mw()
    } else {
        0.0
    };
    if harvest >= draw {
        return Runtime::Unbounded;
    }
    Runtime::Finite(capacity_wh(cfg) / ((draw - harvest) / 1000.0) / 24.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BatteryState {
    /// Wh
    pub energy_remaining: f64,
    /// s
    pub time: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SocSeries {
    pub samples: Vec<BatteryState>,
    /// First sample time at which the battery reads empty.
    pub depleted_at: Option<f64>,
}

/// Fraction of the panel rating delivered at a given time (seconds).
pub trait HarvestProfile {
    fn fraction_at(&self, time: f64) -> f64;
}

impl<F: Fn(f64) -> f64> HarvestProfile for F {
    fn fraction_at(&self, time: f64) -> f64 {
        self(time)
    }
}

/// Same fraction around the clock.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstantHarvest(pub f64);

impl HarvestProfile for ConstantHarvest {
    fn fraction_at(&self, _time: f64) -> f64 {
        self.0
    }
}

/// `day_fraction` of every 24 h at `peak`, darkness for the rest. Days start
/// at t = 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DayNightHarvest {
    pub day_fraction: f64,
    pub peak: f64,
}

impl DayNightHarvest {
    /// Square wave whose 24 h mean equals `cfg.harvest_derating`.
    pub fn matching_mean(cfg: &PowerConfig, day_fraction: f64) -> Self {
        DayNightHarvest {
            day_fraction,
            peak: cfg.harvest_derating / day_fraction,
        }
    }
}

impl HarvestProfile for DayNightHarvest {
    fn fraction_at(&self, time: f64) -> f64 {
        if time.rem_euclid(SECONDS_PER_DAY) < self.day_fraction * SECONDS_PER_DAY {
            self.peak
        } else {
            0.0
        }
    }
}

/// Forward-Euler state of charge, starting full and clamped to
/// `[0, capacity]`. Samples are taken at every step, including t = 0.
pub fn simulate_soc(
    cfg: &PowerConfig,
    horizon_days: f64,
    timestep: f64,
    profile: &dyn HarvestProfile,
) -> Result<SocSeries> {
    cfg.validate()?;
    if !(timestep.is_finite() && timestep > 0.0) {
        return Err(Error::Config(format!(
            "timestep must be positive, got {timestep}"
        )));
    }
    if !(horizon_days.is_finite() && horizon_days > 0.0) {
        return Err(Error::Config(format!(
            "horizon must be positive, got {horizon_days}"
        )));
    }
    let capacity = capacity_wh(cfg);
    let draw_mw = cfg.average_draw_mw();
    let horizon = horizon_days * SECONDS_PER_DAY;
    let steps = (horizon / timestep).ceil() as usize;

    let mut energy = capacity;
    let mut samples = Vec::with_capacity(steps + 1);
    samples.push(BatteryState {
        energy_remaining: energy,
        time: 0.0,
    });
    let mut depleted_at = None;
    for k in 0..steps {
        let t = k as f64 * timestep;
        let harvest_mw = cfg.panel_rating * 1000.0 * profile.fraction_at(t);
        let net_w = (harvest_mw - draw_mw) / 1000.0;
        energy = (energy + net_w * timestep / 3600.0).clamp(0.0, capacity);
        let time = (k + 1) as f64 * timestep;
        samples.push(BatteryState {
            energy_remaining: energy,
            time,
        });
        if energy == 0.0 && depleted_at.is_none() {
            depleted_at = Some(time);
        }
    }
    Ok(SocSeries {
        samples,
        depleted_at,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub duty_cycle_active: f64,
    pub average_draw_mw: f64,
    pub runtime: Runtime,
}

/// Runtime with solar at evenly spaced duty cycles from 0 to 1 inclusive.
pub fn duty_cycle_sweep(cfg: &PowerConfig, steps: usize) -> Vec<SweepRow> {
    let steps = steps.max(1);
    (0..=steps)
        .map(|i| {
            let duty = i as f64 / steps as f64;
            let c = PowerConfig {
                duty_cycle_active: duty,
                ..*cfg
            };
            SweepRow {
                duty_cycle_active: duty,
                average_draw_mw: c.average_draw_mw(),
                runtime: runtime_days(&c, true),
            }
        })
        .collect()
}

/// Highest duty cycle whose solar-backed runtime reaches `days`, found by
/// bisection on the closed form. `None` if even a fully idle device falls
/// short.
pub fn max_duty_cycle_for(cfg: &PowerConfig, days: f64) -> Option<f64> {
    let at = |duty: f64| {
        runtime_days(
            &PowerConfig {
                duty_cycle_active: duty,
                ..*cfg
            },
            true,
        )
    };
    if !at(0.0).at_least(days) {
        return None;
    }
    if at(1.0).at_least(days) {
        return Some(1.0);
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if at(mid).at_least(days) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(lo)
}

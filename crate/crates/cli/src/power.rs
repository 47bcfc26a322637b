//! `bearguard power`: battery runtime summary and SoC series.

use std::io::Write;
use std::path::PathBuf;

use bearguard_core::power::{
    capacity_wh, duty_cycle_sweep, max_duty_cycle_for, runtime_days, simulate_soc, ConstantHarvest,
    DayNightHarvest, HarvestProfile, PowerConfig, Runtime, SocSeries, SECONDS_PER_DAY,
};
use clap::Args;
use serde::Serialize;

use crate::output;
use crate::simulate::load_config;
use crate::CliError;

pub const SOC_FILE: &str = "soc.csv";

/// Target the sweep reports the maximum duty cycle for.
pub const TARGET_DAYS: f64 = 30.0;

#[derive(Debug, Clone, Args)]
pub struct PowerArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long = "horizon-days", default_value_t = 30.0)]
    pub horizon_days: f64,
    /// Simulation step, seconds.
    #[arg(long, default_value_t = 600.0)]
    pub timestep: f64,
    /// Simulate without the panel.
    #[arg(long = "no-solar")]
    pub no_solar: bool,
    /// Print runtime across duty cycles 0..1 and the largest duty cycle
    /// that lasts 30 days.
    #[arg(long = "sweep-duty-cycle")]
    pub sweep_duty_cycle: bool,
    /// Harvest as a day/night square wave with this daylight fraction
    /// instead of a constant average.
    #[arg(long = "day-night")]
    pub day_night: Option<f64>,
    /// Overrides `power.duty_cycle_active` from the config.
    #[arg(long = "duty-cycle")]
    pub duty_cycle: Option<f64>,
    /// Directory for soc.csv.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    #[arg(long)]
    pub force: bool,
}

#[derive(Debug, Serialize)]
struct SocRow {
    time_s: f64,
    energy_wh: f64,
}

pub fn format_runtime(r: Runtime) -> String {
    match r {
        Runtime::Finite(d) => format!("{d:.2} days"),
        Runtime::Unbounded => "unbounded (horizon-clamped)".to_string(),
    }
}

fn soc_csv(series: &SocSeries) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for s in &series.samples {
        w.serialize(SocRow {
            time_s: s.time,
            energy_wh: s.energy_remaining,
        })
        .map_err(|e| CliError::Input(e.to_string()))?;
    }
    w.into_inner().map_err(|e| CliError::Input(e.to_string()))
}

/// Resolves the power section from config and flags.
pub fn resolve(args: &PowerArgs) -> Result<PowerConfig, CliError> {
    let mut cfg = load_config(args.config.as_deref())?.power;
    if let Some(d) = args.duty_cycle {
        cfg.duty_cycle_active = d;
    }
    cfg.validate()
        .map_err(|e| CliError::Input(format!("power config: {e}")))?;
    if let Some(f) = args.day_night {
        if !(f > 0.0 && f <= 1.0) {
            return Err(CliError::Input(format!("--day-night {f} outside (0, 1]")));
        }
    }
    Ok(cfg)
}

pub fn cmd_power(args: &PowerArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let cfg = resolve(args)?;
    let paths = output::prepare(&args.out, &[SOC_FILE], args.force)?;

    let solar = !args.no_solar;
    let profile: Box<dyn HarvestProfile> = match (solar, args.day_night) {
        (false, _) => Box::new(ConstantHarvest(0.0)),
        (true, None) => Box::new(ConstantHarvest(cfg.harvest_derating)),
        (true, Some(f)) => Box::new(DayNightHarvest::matching_mean(&cfg, f)),
    };
    let series = simulate_soc(&cfg, args.horizon_days, args.timestep, profile.as_ref())
        .map_err(|e| CliError::Input(e.to_string()))?;

    let _ = writeln!(out, "capacity: {:.2} Wh", capacity_wh(&cfg));
    let _ = writeln!(
        out,
        "average draw: {:.1} mW (duty cycle {}), average harvest: {:.1} mW",
        cfg.average_draw_mw(),
        cfg.duty_cycle_active,
        cfg.average_harvest_mw()
    );
    let _ = writeln!(
        out,
        "runtime without solar: {}",
        format_runtime(runtime_days(&cfg, false))
    );
    let _ = writeln!(
        out,
        "runtime with solar: {}",
        format_runtime(runtime_days(&cfg, true))
    );
    match series.depleted_at {
        Some(t) => {
            let _ = writeln!(
                out,
                "simulated: depleted after {:.2} days",
                t / SECONDS_PER_DAY
            );
        }
        None => {
            let min = series
                .samples
                .iter()
                .map(|s| s.energy_remaining)
                .fold(f64::INFINITY, f64::min);
            let _ = writeln!(
                out,
                "simulated: survives {} days, lowest charge {:.2} Wh",
                args.horizon_days, min
            );
        }
    }

    if args.sweep_duty_cycle {
        let _ = writeln!(out, "duty_cycle  draw_mw  runtime_with_solar");
        for row in duty_cycle_sweep(&cfg, 10) {
            let _ = writeln!(
                out,
                "{:>10.3}  {:>7.1}  {}",
                row.duty_cycle_active,
                row.average_draw_mw,
                format_runtime(row.runtime)
            );
        }
        match max_duty_cycle_for(&cfg, TARGET_DAYS) {
            Some(d) => {
                let c = PowerConfig {
                    duty_cycle_active: d,
                    ..cfg
                };
                let _ = writeln!(
                    out,
                    "{:>10.4}  {:>7.1}  {}",
                    d,
                    c.average_draw_mw(),
                    format_runtime(runtime_days(&c, true))
                );
                let _ = writeln!(
                    out,
                    "max duty cycle for {TARGET_DAYS} days: {d:.4} (average draw {:.1} mW)",
                    c.average_draw_mw()
                );
            }
            None => {
                let _ = writeln!(
                    out,
                    "max duty cycle for {TARGET_DAYS} days: none, idle draw alone is too high"
                );
            }
        }
    }

    output::write(&paths[0], &soc_csv(&series)?)?;
    Ok(())
}

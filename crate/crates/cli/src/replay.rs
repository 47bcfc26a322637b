//! `bearguard replay`: human-readable timeline of an event log.

use std::fs::File;
use std::io::{BufReader, Write};
use std::path::PathBuf;

use bearguard_core::eventlog::read_event_log;
use bearguard_core::model::{EventKind, EventRecord};
use bearguard_core::sim::EventCounts;
use clap::Args;

use crate::CliError;

#[derive(Debug, Clone, Args)]
pub struct ReplayArgs {
    /// JSONL event log, e.g. events.jsonl from `simulate`.
    pub events: PathBuf,
}

fn summary(e: &EventRecord) -> String {
    let num = |k: &str| {
        e.payload_f64(k)
            .map_or("?".to_string(), |v| format!("{v:.3}"))
    };
    match e.kind {
        EventKind::SegmentDecision => {
            let decision = e
                .payload
                .get("decision")
                .and_then(|v| v.as_str())
                .unwrap_or("?");
            format!(
                "segment {} {decision} (max bear conf {})",
                e.payload
                    .get("segment_index")
                    .map_or("?".into(), |v| v.to_string()),
                num("max_bear_confidence")
            )
        }
        EventKind::SprayTriggered => format!(
            "spray at {} s for {} s, {} left",
            num("trigger_time"),
            num("duration"),
            e.payload
                .get("sprays_remaining_after")
                .map_or("?".into(), |v| v.to_string())
        ),
        EventKind::SprayInhibited => format!(
            "inhibited: {}",
            e.payload
                .get("reason")
                .and_then(|v| v.as_str())
                .unwrap_or("?")
        ),
        EventKind::BatteryLow => "battery low".to_string(),
    }
}

pub fn cmd_replay(args: &ReplayArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let path = &args.events;
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    let events = read_event_log(BufReader::new(file)).map_err(|e| CliError::reading(path, e))?;
    for e in &events {
        let _ = writeln!(
            out,
            "{:>10.3}  {:<16} {}",
            e.timestamp,
            e.kind.to_string(),
            summary(e)
        );
    }
    let c = EventCounts::from_events(&events);
    let _ = writeln!(out, "segments: {}", c.segments);
    let _ = writeln!(out, "bear segments: {}", c.bear_segments);
    let _ = writeln!(out, "sprays: {}", c.sprays);
    let _ = writeln!(out, "inhibits: {}", c.inhibits);
    let _ = writeln!(out, "battery low: {}", c.battery_low);
    Ok(())
}

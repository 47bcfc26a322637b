//! Bear detection and deterrence pipeline.
//!
//! Frames from a detector are grouped into segments ([`segment`]), bear
//! segments drive a spray controller with human inhibition and cooldown
//! ([`controller`]), the device runs off a solar-charged battery
//! ([`power`]), and [`metrics`] scores detections and segment decisions.
//! [`sim`] generates synthetic frame streams from geometric scenarios so the
//! whole chain can be exercised end to end.

pub mod annotations;
pub mod config;
pub mod controller;
pub mod error;
pub mod eventlog;
pub mod metrics;
pub mod model;
pub mod power;
pub mod segment;
pub mod sim;

pub use error::{Error, Result};

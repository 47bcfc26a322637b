//! `bearguard` command-line driver.
//!
//! Exit codes: 0 success, 2 input error (missing or unparsable files,
//! refusing to overwrite), 3 domain error (inputs parse but violate an
//! invariant).

use std::ffi::OsString;
use std::io::Write;

use clap::{Parser, Subcommand};

mod error;
pub mod evaluate;
pub mod fixture;
mod output;
pub mod power;
pub mod replay;
pub mod simulate;

pub use error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "bearguard",
    version,
    about = "Bear detection and deterrence pipeline"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a scenario through detector, segment filter and spray controller.
    Simulate(simulate::SimulateArgs),
    /// Score predictions against ground truth and print the metrics as JSON.
    Evaluate(evaluate::EvaluateArgs),
    /// Battery runtime summary and state-of-charge series.
    Power(power::PowerArgs),
    /// Print a readable timeline of an event log.
    Replay(replay::ReplayArgs),
}

/// Parses `args` and runs the command, writing normal output to `out` and
/// diagnostics to `err`. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{e}");
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
        }
    };
    let result = match &cli.command {
        Command::Simulate(a) => simulate::cmd_simulate(a, out),
        Command::Evaluate(a) => evaluate::cmd_evaluate(a, out),
        Command::Power(a) => power::cmd_power(a, out),
        Command::Replay(a) => replay::cmd_replay(a, out),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.code()
        }
    }
}

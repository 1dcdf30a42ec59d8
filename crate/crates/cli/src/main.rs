//! `dyngt`: run infection-spread testing ensembles and evaluate the
//! matching closed-form approximations.
//!
//! Exit status is 0 on success, 2 for invalid flags, configuration or
//! parameters outside a formula's domain, and 1 for I/O failures.

mod commands;
mod config;
mod output;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::commands::{AnalyticsCommand, SimulateArgs};
use crate::config::RunArgs;

/// Invalid input from the user.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

#[derive(Parser)]
#[command(
    name = "dyngt",
    version,
    about = "Infection spread under capacity-limited testing"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one policy and write curves.csv, summary.json and manifest.json
    Simulate(SimulateArgs),
    /// Run all four policies on common random numbers and write compare.csv
    Compare(RunArgs),
    /// Evaluate closed-form quantities and print them as JSON
    #[command(subcommand)]
    Analytics(AnalyticsCommand),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Simulate(args) => commands::simulate(args),
        Command::Compare(args) => commands::compare(args),
        Command::Analytics(cmd) => commands::analytics(cmd),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            if err.downcast_ref::<UsageError>().is_some()
                || err.downcast_ref::<dyngt::Error>().is_some()
            {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}

//! Command-line pipeline: ingest, encode, fit, diagnose, select, report.

pub mod args;
pub mod commands;
pub mod report;
pub mod synth;

use args::{Cli, Command};
use commands::{cmd_diagnose, cmd_fit, cmd_select, cmd_synth, CliError, PipelineConfig};

/// Runs a parsed command line.
pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Fit(a) => cmd_fit(&a.into()).map(drop),
        Command::Select(a) => cmd_select(&a.into()).map(drop),
        Command::Diagnose { pipeline, select } => {
            cmd_diagnose(&PipelineConfig::from(pipeline), select).map(drop)
        }
        Command::Synth { out, seed, n } => cmd_synth(&out, seed, n).map(drop),
    }
}

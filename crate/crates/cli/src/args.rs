use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use mvreg_core::diagnostics::BpVariant;
use mvreg_core::ingest::FilterConfig;

use crate::commands::{Format, PipelineConfig};

#[derive(Debug, Parser)]
#[command(name = "mvreg", version, about = "Market-value regression for football forwards")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit the full model and write its summary.
    Fit(PipelineArgs),
    /// Backward-eliminate at --alpha and report the final model.
    Select(PipelineArgs),
    /// Breusch-Pagan, VIF, MAPE and plot data for the full or selected model.
    Diagnose {
        #[command(flatten)]
        pipeline: PipelineArgs,
        /// Diagnose the model left after backward elimination.
        #[arg(long)]
        select: bool,
    },
    /// Write a seeded synthetic dataset and its generating coefficients.
    Synth {
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 105)]
        n: usize,
    },
}

#[derive(Debug, Args)]
pub struct PipelineArgs {
    /// Player CSV.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0.1)]
    pub alpha: f64,
    #[arg(long, default_value = "koenker")]
    pub bp_variant: BpVariant,
    #[arg(long, default_value_t = 0.95)]
    pub confidence: f64,
    #[arg(long, default_value_t = 1000)]
    pub min_minutes: u32,
    /// Minimum market value, millions of euros.
    #[arg(long, default_value_t = 20.0)]
    pub min_value: f64,
    #[arg(long, default_value_t = 20)]
    pub age_min: u32,
    #[arg(long, default_value_t = 34)]
    pub age_max: u32,
    /// Keep players who changed club mid-season.
    #[arg(long)]
    pub keep_mid_season: bool,
    #[arg(long, value_enum, default_value_t = Format::Both)]
    pub format: Format,
}

impl From<PipelineArgs> for PipelineConfig {
    fn from(a: PipelineArgs) -> Self {
        PipelineConfig {
            input: a.input,
            out: a.out,
            alpha: a.alpha,
            bp_variant: a.bp_variant,
            filters: FilterConfig {
                min_age: a.age_min,
                max_age: a.age_max,
                min_minutes: a.min_minutes,
                min_market_value_m_eur: a.min_value,
                exclude_mid_season_transfers: !a.keep_mid_season,
            },
            format: a.format,
            confidence: a.confidence,
        }
    }
}

//! Command-line pipeline around the detection library: dataset synthesis,
//! per-pair extraction, ensemble fusion, ensemble search, detection scoring,
//! and image-level grading. Every command is a thin shell over library
//! calls, so scripted runs and direct library use produce identical output.

pub mod commands;
pub mod config;
pub mod report;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use madetect_core::Result;

use config::PipelineConfig;
use report::ReportFormat;

#[derive(Debug, Parser)]
#[command(name = "madetect", version, about = "Ensemble lesion detection pipeline")]
pub struct Cli {
    /// Pipeline configuration file; built-in defaults when omitted.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Override every configured RNG seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Cap the worker thread count.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Summary report format.
    #[arg(long, global = true, value_enum, default_value = "json")]
    pub report: ReportFormat,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic dataset with exact ground truth.
    Synth(commands::synth::SynthArgs),
    /// Run one preprocessing/extractor pair over a dataset.
    Extract(commands::extract::ExtractArgs),
    /// Fuse an ensemble's detections over a dataset.
    Fuse(commands::fuse::FuseArgs),
    /// Search for the best ensemble on a training set.
    Search(commands::search::SearchArgs),
    /// Score fused detections against ground truth.
    Evaluate(commands::evaluate::EvaluateArgs),
    /// Image-level screening report from fused detections.
    Grade(commands::grade::GradeArgs),
}

/// Load the configuration and dispatch one parsed invocation.
pub fn run(cli: &Cli) -> Result<()> {
    let mut config = match &cli.config {
        Some(path) => PipelineConfig::load(path)?,
        None => PipelineConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.search.annealing.seed = seed;
    }
    match &cli.command {
        Command::Synth(args) => commands::synth::run(args, &config, cli.seed),
        Command::Extract(args) => commands::extract::run(args, &config),
        Command::Fuse(args) => commands::fuse::run(args, &config),
        Command::Search(args) => commands::search::run(args, &config, cli.report),
        Command::Evaluate(args) => commands::evaluate::run(args, &config, cli.report),
        Command::Grade(args) => commands::grade::run(args, &config, cli.report),
    }
}

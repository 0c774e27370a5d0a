//! Command-line orchestration of the topic diffusion pipeline: ingest a
//! time-stamped corpus, train one warm-started autoencoder per sliding
//! window, list topic keywords and score term diffusion.

pub mod config;
pub mod error;
pub mod layout;
pub mod manifest;
pub mod stages;
pub mod svg;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use config::{PipelineConfig, SliceSpec};
pub use error::CliError;
pub use layout::Layout;
pub use manifest::RunManifest;
pub use stages::RunOptions;

#[derive(Debug, Parser)]
#[command(
    name = "topic-drift",
    version,
    about = "Topic diffusion discovery over time-sliced corpora"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Slice the corpus and write per-slice document-term counts.
    Ingest(CommonArgs),
    /// Train one autoencoder per window and write checkpoints and topic matrices.
    Train(CommonArgs),
    /// Write the top keywords of every topic.
    Topics(CommonArgs),
    /// Score term diffusion between consecutive windows.
    Diffuse(CommonArgs),
    /// Run ingest, train, topics and diffuse in sequence.
    Pipeline(CommonArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Pipeline configuration (JSON).
    #[arg(long)]
    pub config: PathBuf,
    /// Replace existing outputs.
    #[arg(long)]
    pub force: bool,
    /// Comma-separated terms to score and chart.
    #[arg(long, value_delimiter = ',')]
    pub terms: Option<Vec<String>>,
    /// Disable data parallelism in training.
    #[arg(long)]
    pub deterministic: bool,
}

impl Command {
    fn parts(&self) -> (&'static str, &CommonArgs) {
        match self {
            Command::Ingest(a) => ("ingest", a),
            Command::Train(a) => ("train", a),
            Command::Topics(a) => ("topics", a),
            Command::Diffuse(a) => ("diffuse", a),
            Command::Pipeline(a) => ("pipeline", a),
        }
    }
}

pub fn run(cli: &Cli) -> Result<RunManifest, CliError> {
    let (name, args) = cli.command.parts();
    let cfg = PipelineConfig::load(&args.config)?;
    let opts = RunOptions {
        force: args.force,
        deterministic: args.deterministic,
        terms: args.terms.clone(),
    };
    if name == "pipeline" {
        stages::run_pipeline(&cfg, &opts)
    } else {
        stages::run_single(name, &cfg, &opts)
    }
}

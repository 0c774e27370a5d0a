//! The four pipeline stages and their composition.

mod diffuse;
mod ingest;
mod topics;
mod train;

use std::time::Instant;

pub use diffuse::{diffuse_stage, diffusion_csv, DiffuseOutcome, DiffusionReport};
pub use ingest::{ingest, load_vocabulary, read_vocabulary_terms, IngestSummary, SliceSummary};
pub use topics::{topic_table, topics_csv, topics_stage, RankedTerm, TopicRow};
pub use train::{load_slice_counts, read_topic_matrix, train_stage, write_topic_matrix};

use crate::config::PipelineConfig;
use crate::error::CliError;
use crate::layout::Layout;
use crate::manifest::RunManifest;

pub const STAGES: [&str; 4] = ["ingest", "train", "topics", "diffuse"];

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub force: bool,
    pub deterministic: bool,
    pub terms: Option<Vec<String>>,
}

fn elapsed_ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

/// Runs one stage, recording it in the manifest.
pub fn run_stage(
    name: &str,
    cfg: &PipelineConfig,
    layout: &Layout,
    opts: &RunOptions,
    manifest: &mut RunManifest,
) -> Result<(), CliError> {
    let start = Instant::now();
    let res = match name {
        "ingest" => ingest(cfg, layout, opts.force).map(|_| ()),
        "train" => train_stage(cfg, layout, opts.force, opts.deterministic).map(|w| {
            manifest.windows = w;
        }),
        "topics" => topics_stage(cfg, layout, opts.force).map(|_| ()),
        "diffuse" => diffuse_stage(cfg, layout, opts.force, opts.terms.as_deref()).map(|_| ()),
        other => Err(CliError::Config(anyhow::anyhow!("unknown stage {other}"))),
    };
    res.map_err(|e| e.context(format!("stage {name} failed")))?;
    manifest.record_stage(name, elapsed_ms(start));
    Ok(())
}

/// A single stage, merged into any manifest already present.
pub fn run_single(
    name: &str,
    cfg: &PipelineConfig,
    opts: &RunOptions,
) -> Result<RunManifest, CliError> {
    let layout = Layout::new(&cfg.output_dir);
    let mut manifest = RunManifest::open(&layout, cfg, opts.deterministic);
    run_stage(name, cfg, &layout, opts, &mut manifest)?;
    manifest.save(&layout)?;
    Ok(manifest)
}

/// All stages in order under one fresh manifest. Existing outputs are only
/// replaced with `force`.
pub fn run_pipeline(cfg: &PipelineConfig, opts: &RunOptions) -> Result<RunManifest, CliError> {
    let layout = Layout::new(&cfg.output_dir);
    if !opts.force && layout.manifest().exists() {
        return Err(CliError::Config(anyhow::anyhow!(
            "refusing to overwrite the run in {} (use --force)",
            layout.root().display()
        )));
    }
    let mut manifest = RunManifest::new(cfg, opts.deterministic);
    for name in STAGES {
        run_stage(name, cfg, &layout, opts, &mut manifest)?;
    }
    manifest.save(&layout)?;
    Ok(manifest)
}

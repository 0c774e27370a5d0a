use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use topic_drift_core::corpus::{
    assign_documents, build_vocabulary, count_matrix, load_corpus, parse_alias_csv,
    parse_dictionary, triplet::save_triplets, Document, Rejection, Vocabulary,
};

use crate::config::PipelineConfig;
use crate::error::{data, CliError};
use crate::layout::{claim_outputs, ensure_dir, read, read_string, write_atomic, Layout};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SliceSummary {
    pub label: String,
    pub start: String,
    pub end: String,
    pub documents: usize,
    pub nonzero_cells: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IngestSummary {
    pub documents_read: usize,
    pub vocabulary_size: usize,
    pub slices: Vec<SliceSummary>,
    pub rejected: usize,
    pub rejections: Vec<Rejection>,
    pub warnings: Vec<String>,
}

/// Dictionary plus optional alias rules from the config.
pub fn load_vocabulary(cfg: &PipelineConfig) -> Result<Vocabulary, CliError> {
    let keywords = parse_dictionary(&read_string(&cfg.dictionary)?);
    vocabulary_with_aliases(&keywords, cfg)
}

pub(crate) fn vocabulary_with_aliases(
    keywords: &[String],
    cfg: &PipelineConfig,
) -> Result<Vocabulary, CliError> {
    let aliases = match &cfg.aliases {
        Some(p) => parse_alias_csv(&read(p)?)
            .map_err(|e| data(anyhow::Error::new(e).context(format!("aliases {}", p.display()))))?,
        None => Vec::new(),
    };
    build_vocabulary(keywords, &aliases).map_err(data)
}

pub fn ingest(
    cfg: &PipelineConfig,
    layout: &Layout,
    force: bool,
) -> Result<IngestSummary, CliError> {
    claim_outputs(&[layout.slices_dir(), layout.ingest_summary()], force)?;
    let (corpus, mut report) = load_corpus(&cfg.corpus).map_err(data)?;
    let vocab = load_vocabulary(cfg)?;
    let mut slices = cfg.time_slices();
    report.extend(assign_documents(&corpus, &mut slices).map_err(data)?);

    ensure_dir(&layout.slices_dir())?;
    let by_id: HashMap<&str, &Document> = corpus
        .documents
        .iter()
        .map(|d| (d.id.as_str(), d))
        .collect();
    let mut warnings = Vec::new();
    let mut summaries = Vec::with_capacity(slices.len());
    for s in &slices {
        if s.doc_ids.is_empty() {
            let w = format!("slice {} has no documents", s.label);
            eprintln!("warning: {w}");
            warnings.push(w);
        }
        let counts = count_matrix(s.doc_ids.iter().map(|id| by_id[id.as_str()]), &vocab);
        save_triplets(&layout.slice_stem(&s.label), &counts, vocab.terms()).map_err(data)?;
        summaries.push(SliceSummary {
            label: s.label.clone(),
            start: s.start.to_string(),
            end: s.end.to_string(),
            documents: s.doc_ids.len(),
            nonzero_cells: counts.nnz(),
        });
    }
    let mut vocab_file = vocab.terms().join("\n");
    vocab_file.push('\n');
    write_atomic(&layout.vocabulary(), vocab_file.as_bytes())?;

    let summary = IngestSummary {
        documents_read: corpus.len(),
        vocabulary_size: vocab.len(),
        slices: summaries,
        rejected: report.count(),
        rejections: report.rejects,
        warnings,
    };
    let json = serde_json::to_vec_pretty(&summary).map_err(data)?;
    write_atomic(&layout.ingest_summary(), &json)?;
    Ok(summary)
}

/// Terms in index order, as written by [`ingest`].
pub fn read_vocabulary_terms(layout: &Layout) -> Result<Vec<String>, CliError> {
    Ok(read_string(&layout.vocabulary())?
        .lines()
        .map(str::to_string)
        .collect())
}

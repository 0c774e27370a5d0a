use serde::{Deserialize, Serialize};
use topic_drift_core::diffusion::TopicTermMatrix;

use super::ingest::read_vocabulary_terms;
use super::train::read_topic_matrix;
use crate::config::PipelineConfig;
use crate::error::{data, CliError};
use crate::layout::{claim_outputs, write_atomic, Layout};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedTerm {
    pub term: String,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicRow {
    pub window: String,
    pub topic: usize,
    pub terms: Vec<RankedTerm>,
}

/// Top `top_n` terms of every topic by raw weight, ties to the earlier
/// vocabulary entry. Depends on `u` alone.
pub fn topic_table(u: &TopicTermMatrix, terms: &[String], top_n: usize) -> Vec<TopicRow> {
    (0..u.k())
        .map(|topic| TopicRow {
            window: u.window_label().to_string(),
            topic,
            terms: u
                .top_terms(topic, top_n)
                .into_iter()
                .map(|i| RankedTerm {
                    term: terms[i].clone(),
                    weight: u.values().get(topic, i),
                })
                .collect(),
        })
        .collect()
}

pub fn topics_csv(rows: &[TopicRow]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["window", "topic", "rank", "term", "weight"])
        .map_err(data)?;
    for row in rows {
        for (rank, t) in row.terms.iter().enumerate() {
            w.write_record([
                row.window.clone(),
                row.topic.to_string(),
                (rank + 1).to_string(),
                t.term.clone(),
                t.weight.to_string(),
            ])
            .map_err(data)?;
        }
    }
    w.into_inner().map_err(|e| data(anyhow::anyhow!("{e}")))
}

pub fn topics_stage(
    cfg: &PipelineConfig,
    layout: &Layout,
    force: bool,
) -> Result<Vec<TopicRow>, CliError> {
    let terms = read_vocabulary_terms(layout)?;
    let mut rows = Vec::new();
    for label in cfg.window_labels() {
        let u = read_topic_matrix(layout, &label)?;
        if u.m() != terms.len() {
            return Err(data(anyhow::anyhow!(
                "topic matrix for window {label} has {} terms, vocabulary has {}",
                u.m(),
                terms.len()
            )));
        }
        rows.extend(topic_table(&u, &terms, cfg.top_n));
    }
    claim_outputs(&[layout.topics_csv(), layout.topics_json()], force)?;
    write_atomic(&layout.topics_csv(), &topics_csv(&rows)?)?;
    let json = serde_json::to_vec_pretty(&rows).map_err(data)?;
    write_atomic(&layout.topics_json(), &json)?;
    Ok(rows)
}

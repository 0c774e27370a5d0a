use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use topic_drift_core::diffusion::{
    align_topics, diffusion_series, normalize_termwise, significance_threshold, DiffusionParams,
    DiffusionSeries, TermTopicDistribution, ThresholdParams, TopicAlignment,
};

use super::ingest::{read_vocabulary_terms, vocabulary_with_aliases};
use super::train::read_topic_matrix;
use crate::config::PipelineConfig;
use crate::error::{data, CliError};
use crate::layout::{claim_outputs, ensure_dir, write_atomic, Layout};
use crate::svg::line_chart;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiffusionReport {
    pub windows: Vec<String>,
    pub topics: usize,
    pub alpha: f64,
    pub threshold: f64,
    pub terms_scored: usize,
    pub skipped_terms: Vec<String>,
    pub classes: BTreeMap<String, usize>,
    /// Terms with no topic mass, per window.
    pub degenerate_terms: BTreeMap<String, usize>,
    pub charts: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct DiffuseOutcome {
    pub report: DiffusionReport,
    pub series: Vec<(String, DiffusionSeries)>,
    pub distributions: Vec<TermTopicDistribution>,
    pub alignments: Vec<TopicAlignment>,
}

pub fn diffusion_csv(series: &[(String, DiffusionSeries)]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "term",
        "window_pair",
        "d_gjs",
        "threshold",
        "significant",
        "support",
        "classification",
    ])
    .map_err(data)?;
    for (name, s) in series {
        for (j, score) in s.scores.iter().enumerate() {
            w.write_record([
                name.clone(),
                format!("{}->{}", s.window_labels[j], s.window_labels[j + 1]),
                score.to_string(),
                s.threshold.to_string(),
                s.significant[j].to_string(),
                s.support_per_window[j + 1].to_string(),
                s.classification.to_string(),
            ])
            .map_err(data)?;
        }
    }
    w.into_inner().map_err(|e| data(anyhow::anyhow!("{e}")))
}

/// `filter` overrides the config's term list; with neither, every term is
/// scored and charted.
pub fn diffuse_stage(
    cfg: &PipelineConfig,
    layout: &Layout,
    force: bool,
    filter: Option<&[String]>,
) -> Result<DiffuseOutcome, CliError> {
    let terms = read_vocabulary_terms(layout)?;
    let vocab = vocabulary_with_aliases(&terms, cfg)?;
    let labels = cfg.window_labels();
    if labels.len() < 2 {
        return Err(CliError::Config(anyhow::anyhow!(
            "diffusion needs at least 2 windows, the config yields {}",
            labels.len()
        )));
    }
    let us = labels
        .iter()
        .map(|l| read_topic_matrix(layout, l))
        .collect::<Result<Vec<_>, _>>()?;
    let distributions: Vec<TermTopicDistribution> = us.iter().map(normalize_termwise).collect();

    let mut skipped = Vec::new();
    let selected: Vec<usize> = match filter.or(cfg.terms.as_deref()) {
        Some(list) => {
            let mut picked = Vec::new();
            for raw in list {
                match vocab.index_of(raw) {
                    Some(i) if !picked.contains(&i) => picked.push(i),
                    Some(_) => {}
                    None => skipped.push(raw.clone()),
                }
            }
            picked
        }
        None => (0..terms.len()).collect(),
    };
    for s in &skipped {
        eprintln!("warning: unknown term {s:?} skipped");
    }

    let params = DiffusionParams {
        alpha: cfg.alpha,
        tau_mass: cfg.tau_mass,
        cells: cfg.cells(),
        weights: None,
    };
    let series = selected
        .par_iter()
        .map(|&i| diffusion_series(&distributions, i, &params).map(|s| (terms[i].clone(), s)))
        .collect::<Result<Vec<_>, _>>()
        .map_err(data)?;
    let alignments = us
        .windows(2)
        .map(|p| align_topics(&p[0], &p[1]))
        .collect::<Result<Vec<_>, _>>()
        .map_err(data)?;
    let threshold = match series.first() {
        Some((_, s)) => s.threshold,
        None => significance_threshold(&ThresholdParams {
            k: us[0].k(),
            t: 2,
            alpha: cfg.alpha,
            cells: cfg.cells(),
        })
        .map_err(data)?,
    };

    claim_outputs(
        &[
            layout.diffusion_csv(),
            layout.diffusion_report(),
            layout.alignment(),
            layout.charts_dir(),
        ],
        force,
    )?;
    write_atomic(&layout.diffusion_csv(), &diffusion_csv(&series)?)?;
    let alignment_json = serde_json::to_vec_pretty(&alignments).map_err(data)?;
    write_atomic(&layout.alignment(), &alignment_json)?;

    ensure_dir(&layout.charts_dir())?;
    let mut charts = Vec::with_capacity(series.len());
    for (name, s) in &series {
        let pairs: Vec<String> = s
            .window_labels
            .windows(2)
            .map(|w| format!("{}->{}", w[0], w[1]))
            .collect();
        let path = layout.chart(name);
        let title = format!("{name} ({})", s.classification);
        write_atomic(
            &path,
            line_chart(&title, &pairs, &s.scores, s.threshold).as_bytes(),
        )?;
        charts.push(layout.relative(&path));
    }

    let mut classes = BTreeMap::new();
    for (_, s) in &series {
        *classes.entry(s.classification.to_string()).or_insert(0) += 1;
    }
    let report = DiffusionReport {
        windows: labels,
        topics: us[0].k(),
        alpha: cfg.alpha,
        threshold,
        terms_scored: series.len(),
        skipped_terms: skipped,
        classes,
        degenerate_terms: distributions
            .iter()
            .map(|d| (d.window_label.clone(), d.degenerate_terms.len()))
            .collect(),
        charts,
    };
    let json = serde_json::to_vec_pretty(&report).map_err(data)?;
    write_atomic(&layout.diffusion_report(), &json)?;
    Ok(DiffuseOutcome {
        report,
        series,
        distributions,
        alignments,
    })
}

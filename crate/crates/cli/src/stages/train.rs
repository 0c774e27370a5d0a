use topic_drift_core::corpus::triplet::{load_triplets, save_triplets};
use topic_drift_core::corpus::{window_stack, SparseDocTermMatrix};
use topic_drift_core::diffusion::{
    decode_topic_binary, decode_topic_csv, encode_topic_binary, encode_topic_csv, TopicTermMatrix,
    DENSE_CSV_MAX_TERMS,
};
use topic_drift_core::dnae::{
    extract_topic_term, init_model, save_checkpoint, train, warm_start, DnaeError,
};

use super::ingest::read_vocabulary_terms;
use crate::config::PipelineConfig;
use crate::error::{data, CliError};
use crate::layout::{claim_outputs, ensure_dir, read, write_atomic, Layout};
use crate::manifest::WindowRecord;

fn dnae_error(e: DnaeError) -> CliError {
    match e {
        DnaeError::Divergence { .. } => CliError::Divergence(e.into()),
        DnaeError::Config(_) => CliError::Config(e.into()),
        _ => data(e),
    }
}

/// Per-slice count matrices written by ingest, in slice order.
pub fn load_slice_counts(
    cfg: &PipelineConfig,
    layout: &Layout,
) -> Result<Vec<(String, SparseDocTermMatrix)>, CliError> {
    cfg.slices
        .iter()
        .map(|s| {
            let (m, _) = load_triplets::<u32>(&layout.slice_stem(&s.label)).map_err(|e| {
                data(
                    anyhow::Error::new(e)
                        .context(format!("slice {} (has ingest been run?)", s.label)),
                )
            })?;
            Ok((s.label.clone(), m))
        })
        .collect()
}

/// Dense CSV with a term header, or the binary form above the CSV size cap.
pub fn write_topic_matrix(
    layout: &Layout,
    u: &TopicTermMatrix,
    terms: &[String],
) -> Result<std::path::PathBuf, CliError> {
    let label = u.window_label();
    if u.m() > DENSE_CSV_MAX_TERMS {
        let path = layout.u_binary(label);
        write_atomic(&path, &encode_topic_binary(u))?;
        Ok(path)
    } else {
        let path = layout.u_csv(label);
        let csv = encode_topic_csv(u, terms).map_err(data)?;
        write_atomic(&path, csv.as_bytes())?;
        Ok(path)
    }
}

pub fn read_topic_matrix(layout: &Layout, label: &str) -> Result<TopicTermMatrix, CliError> {
    let binary = layout.u_binary(label);
    let u = if binary.exists() {
        decode_topic_binary(&read(&binary)?)
    } else {
        decode_topic_csv(&read(&layout.u_csv(label))?, label).map(|(u, _)| u)
    };
    u.map_err(|e| data(anyhow::Error::new(e).context(format!("topic matrix for window {label}"))))
}

pub fn train_stage(
    cfg: &PipelineConfig,
    layout: &Layout,
    force: bool,
    deterministic: bool,
) -> Result<Vec<WindowRecord>, CliError> {
    let terms = read_vocabulary_terms(layout)?;
    let counts = load_slice_counts(cfg, layout)?;
    claim_outputs(
        &[
            layout.windows_dir(),
            layout.checkpoints_dir(),
            layout.u_dir(),
        ],
        force,
    )?;
    for d in [
        layout.windows_dir(),
        layout.checkpoints_dir(),
        layout.u_dir(),
    ] {
        ensure_dir(&d)?;
    }
    let windows = window_stack(&counts, cfg.window).map_err(data)?;
    let dnae = cfg.effective_dnae(deterministic);

    let mut records = Vec::with_capacity(windows.len());
    let mut prev = None;
    for (i, (label, x)) in windows.iter().enumerate() {
        save_triplets(&layout.window_stem(label), x, &terms).map_err(data)?;
        let at_window = |e: DnaeError| dnae_error(e).context(format!("window {label}"));
        let model = match &prev {
            None => {
                let mut m = init_model(&dnae, x.n_cols()).map_err(at_window)?;
                m.assign_window(label);
                m
            }
            Some(p) => warm_start(p, x.n_cols(), label).map_err(at_window)?,
        };
        let (model, report) = train(model, x, &dnae).map_err(at_window)?;

        let checkpoint = layout.checkpoint(label);
        write_atomic(&checkpoint, &save_checkpoint(&model))?;
        let u_path = write_topic_matrix(layout, &extract_topic_term(&model), &terms)?;
        records.push(WindowRecord {
            label: label.clone(),
            slices: cfg.slices[i..i + cfg.window]
                .iter()
                .map(|s| s.label.clone())
                .collect(),
            documents: x.n_rows(),
            warm_started_from: i.checked_sub(1).map(|j| windows[j].0.clone()),
            rmse: report.final_rmse,
            rmse_per_epoch: report.rmse_per_epoch,
            min_weight_per_epoch: report.min_weight_per_epoch,
            checkpoint: layout.relative(&checkpoint),
            u_matrix: layout.relative(&u_path),
        });
        prev = Some(model);
    }
    Ok(records)
}

//! Library-level run over the planted stream: corpus to counts to windows,
//! warm-started training, topic extraction and diffusion scoring.

use std::collections::HashMap;

use topic_drift_core::corpus::{
    assign_documents, build_vocabulary, count_matrix, window_stack, Corpus, Document,
    SparseDocTermMatrix,
};
use topic_drift_core::diffusion::{
    align_topics, diffusion_series, history_divergence, normalize_termwise, DiffusionParams,
};
use topic_drift_core::dnae::{
    extract_topic_term, init_model, load_checkpoint, save_checkpoint, train, warm_start, DnaeConfig,
};
use topic_drift_core::synthetic::{planted_drift, PlantedDriftConfig};

#[test]
fn migrating_term_is_detected_at_its_transition() {
    let stream = planted_drift(&PlantedDriftConfig::default()).unwrap();
    let vocab = build_vocabulary(&stream.keywords, &Vec::<(String, String)>::new()).unwrap();
    let corpus = Corpus {
        documents: stream.documents.clone(),
    };
    let mut slices = stream.slices.clone();
    let report = assign_documents(&corpus, &mut slices).unwrap();
    assert!(report.is_empty());

    let by_id: HashMap<&str, &Document> = corpus
        .documents
        .iter()
        .map(|d| (d.id.as_str(), d))
        .collect();
    let counts: Vec<(String, SparseDocTermMatrix)> = slices
        .iter()
        .map(|s| {
            let docs = s.doc_ids.iter().map(|id| by_id[id.as_str()]);
            (s.label.clone(), count_matrix(docs, &vocab))
        })
        .collect();
    let windows = window_stack(&counts, 1).unwrap();

    let cfg = DnaeConfig {
        hidden_dims: vec![8, 4],
        learning_rate: 0.05,
        epochs: 300,
        batch_size: 16,
        seed: 1,
        ..DnaeConfig::default()
    };
    let mut prev = None;
    let mut us = Vec::new();
    for (label, x) in &windows {
        let model = match &prev {
            None => {
                let mut m = init_model(&cfg, x.n_cols()).unwrap();
                m.assign_window(label);
                m
            }
            Some(p) => warm_start(p, x.n_cols(), label).unwrap(),
        };
        let (model, report) = train(model, x, &cfg).unwrap();
        assert!(report.min_weight_per_epoch.iter().all(|&w| w >= 0.0));
        assert_eq!(load_checkpoint(&save_checkpoint(&model)).unwrap(), model);
        us.push(extract_topic_term(&model));
        prev = Some(model);
    }
    assert_eq!(us[2].window_label(), "s3");
    assert_eq!(prev.unwrap().provenance().lineage, ["s1", "s2", "s3", "s4"]);

    for pair in us.windows(2) {
        assert!(align_topics(&pair[0], &pair[1]).unwrap().is_identity());
    }

    let dists: Vec<_> = us.iter().map(normalize_termwise).collect();
    let params = DiffusionParams::default();
    let migrant = diffusion_series(&dists, 0, &params).unwrap();
    assert!(migrant.significant[1], "{:?}", migrant.scores);
    assert!(!migrant.significant[0] && !migrant.significant[2]);
    for term in 1..stream.keywords.len() {
        let s = diffusion_series(&dists, term, &params).unwrap();
        assert!(
            s.significant.iter().all(|&b| !b),
            "term {term}: {:?}",
            s.scores
        );
    }

    let (whole, _) = history_divergence(&dists, 0, None, 0.05).unwrap();
    let (still, _) = history_divergence(&dists, 1, None, 0.05).unwrap();
    assert!(whole > still);
}

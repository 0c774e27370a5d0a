mod common;

use std::fs;

use common::*;
use serde_json::{json, Value};
use tempfile::tempdir;
use topic_drift::RunManifest;
use topic_drift_core::corpus::triplet::load_triplets;
use topic_drift_core::corpus::WeightedMatrix;
use topic_drift_core::dnae::{load_checkpoint, rmse_sparse};
use topic_drift_core::synthetic::PlantedDriftConfig;

fn small() -> PlantedDriftConfig {
    PlantedDriftConfig {
        docs_per_topic: 10,
        ..PlantedDriftConfig::default()
    }
}

fn quick_dnae(epochs: usize) -> Value {
    json!({"hidden_dims": [8, 4], "learning_rate": 0.05, "epochs": epochs, "batch_size": 16})
}

#[test]
fn pipeline_runs_refuses_overwrite_and_reproduces() {
    let dir = tempdir().unwrap();
    let (config, _) = write_planted(dir.path(), &small(), json!({"dnae": quick_dnae(20)}));
    let config = config.to_str().unwrap();
    let out = dir.path().join("out");

    let first = run(&["pipeline", "--config", config, "--deterministic"]);
    assert!(first.status.success(), "{}", stderr(&first));
    let manifest = RunManifest::load(&out.join("reports/manifest.json")).unwrap();
    let stages: Vec<&str> = manifest.stages.iter().map(|s| s.name.as_str()).collect();
    assert_eq!(stages, ["ingest", "train", "topics", "diffuse"]);
    assert_eq!(manifest.windows.len(), 4);
    assert!(manifest.deterministic);

    let snapshot = |name: &str| read(out.join(name));
    let files = [
        "checkpoints/s1.dnae",
        "checkpoints/s4.dnae",
        "U/s1.csv",
        "U/s4.csv",
        "reports/diffusion.csv",
        "reports/topics.csv",
    ];
    let before: Vec<Vec<u8>> = files.iter().map(|f| snapshot(f)).collect();

    let again = run(&["pipeline", "--config", config, "--deterministic"]);
    assert_eq!(again.status.code(), Some(1));
    assert!(stderr(&again).contains("--force"));

    let forced = run(&["pipeline", "--config", config, "--deterministic", "--force"]);
    assert!(forced.status.success(), "{}", stderr(&forced));
    for (f, b) in files.iter().zip(&before) {
        assert_eq!(&snapshot(f), b, "{f} changed between runs");
    }
}

#[test]
fn manifest_rmse_matches_checkpoint() {
    let dir = tempdir().unwrap();
    let (config, _) = write_planted(
        dir.path(),
        &small(),
        json!({"dnae": quick_dnae(15), "window": 2}),
    );
    let out = run(&["pipeline", "--config", config.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    let root = dir.path().join("out");
    let manifest = RunManifest::load(&root.join("reports/manifest.json")).unwrap();
    assert_eq!(manifest.windows.len(), 3);
    for w in &manifest.windows {
        let model = load_checkpoint(&read(root.join(&w.checkpoint))).unwrap();
        let (x, _) = load_triplets::<f64>(&root.join("windows").join(&w.label)).unwrap();
        let x: WeightedMatrix = x;
        let recomputed = rmse_sparse(&model, &x).unwrap();
        assert!(
            (recomputed - w.rmse).abs() <= 1e-12,
            "{} vs {}",
            recomputed,
            w.rmse
        );
        assert_eq!(w.rmse_per_epoch.len(), 15);
        assert!(w.min_weight_per_epoch.iter().all(|&v| v >= 0.0));
    }
    assert_eq!(manifest.windows[1].warm_started_from.as_deref(), Some("s2"));
}

#[test]
fn three_slices_window_two() {
    let dir = tempdir().unwrap();
    let cfg = PlantedDriftConfig {
        slices: 3,
        ..small()
    };
    let (config, _) = write_planted(
        dir.path(),
        &cfg,
        json!({"dnae": quick_dnae(3), "window": 2}),
    );
    let config = config.to_str().unwrap();
    for stage in ["ingest", "train"] {
        let out = run(&[stage, "--config", config]);
        assert!(out.status.success(), "{}", stderr(&out));
    }
    let names = |d: &str| {
        let mut v: Vec<String> = fs::read_dir(dir.path().join("out").join(d))
            .unwrap()
            .map(|e| e.unwrap().file_name().into_string().unwrap())
            .collect();
        v.sort();
        v
    };
    assert_eq!(names("checkpoints"), ["s2.dnae", "s3.dnae"]);
    assert_eq!(names("U"), ["s2.csv", "s3.csv"]);

    let retrain = run(&["train", "--config", config]);
    assert_eq!(retrain.status.code(), Some(1));
}

#[test]
fn diffuse_filter_and_skipped_terms() {
    let dir = tempdir().unwrap();
    let (config, _) = write_planted(dir.path(), &small(), json!({"dnae": quick_dnae(5)}));
    let config = config.to_str().unwrap();
    for stage in ["ingest", "train"] {
        assert!(run(&[stage, "--config", config]).status.success());
    }
    let out = run(&[
        "diffuse",
        "--config",
        config,
        "--terms",
        "term00,TERM07,nosuchterm,term31",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stderr(&out).contains("nosuchterm"));
    let root = dir.path().join("out/reports");
    let mut charts: Vec<String> = fs::read_dir(root.join("charts"))
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    charts.sort();
    assert_eq!(charts, ["term00.svg", "term07.svg", "term31.svg"]);
    let report: Value = serde_json::from_slice(&read(root.join("diffusion_report.json"))).unwrap();
    assert_eq!(report["skipped_terms"], json!(["nosuchterm"]));
    let csv = String::from_utf8(read(root.join("diffusion.csv"))).unwrap();
    assert_eq!(
        csv.lines().next().unwrap(),
        "term,window_pair,d_gjs,threshold,significant,support,classification"
    );
    assert_eq!(csv.lines().count(), 1 + 3 * 3);
    let alignment: Value = serde_json::from_slice(&read(root.join("alignment.json"))).unwrap();
    assert_eq!(alignment.as_array().unwrap().len(), 3);
}

#[test]
fn topics_table_shape() {
    let dir = tempdir().unwrap();
    let cfg = PlantedDriftConfig {
        slices: 5,
        ..small()
    };
    let dnae = json!({"hidden_dims": [20], "epochs": 1, "batch_size": 32});
    let (config, _) = write_planted(dir.path(), &cfg, json!({"dnae": dnae, "top_n": 5}));
    let config = config.to_str().unwrap();
    for stage in ["ingest", "train", "topics"] {
        let out = run(&[stage, "--config", config]);
        assert!(out.status.success(), "{}", stderr(&out));
    }
    let rows: Value =
        serde_json::from_slice(&read(dir.path().join("out/reports/topics.json"))).unwrap();
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 100);
    assert!(rows
        .iter()
        .all(|r| r["terms"].as_array().unwrap().len() == 5));
}

fn write_config(dir: &std::path::Path, config: &Value) -> String {
    let path = dir.join("config.json");
    fs::write(&path, serde_json::to_vec(config).unwrap()).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn ingest_empty_corpus_and_out_of_range_documents() {
    let dir = tempdir().unwrap();
    fs::write(dir.path().join("dictionary.txt"), "alpha\nbeta\n").unwrap();
    fs::write(dir.path().join("corpus.jsonl"), "").unwrap();
    let mut config = json!({
        "corpus": "corpus.jsonl",
        "dictionary": "dictionary.txt",
        "slices": [
            {"label": "a", "start": "2020-01-01", "end": "2021-01-01"},
            {"label": "b", "start": "2021-01-01", "end": "2022-01-01"}
        ],
        "dnae": {"hidden_dims": [1]},
        "output_dir": "out"
    });
    let path = write_config(dir.path(), &config);
    let out = run(&["ingest", "--config", &path]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stderr(&out).contains("warning: slice a has no documents"));
    let summary: Value =
        serde_json::from_slice(&read(dir.path().join("out/reports/ingest_summary.json"))).unwrap();
    assert_eq!(summary["slices"][0]["documents"], 0);
    assert_eq!(summary["slices"][1]["documents"], 0);
    assert_eq!(summary["warnings"].as_array().unwrap().len(), 2);

    fs::write(
        dir.path().join("corpus.jsonl"),
        "{\"id\":\"x\",\"timestamp\":\"2019-05-01\",\"text\":\"alpha\"}\n\
         {\"id\":\"y\",\"timestamp\":\"2020-05-01\",\"text\":\"alpha beta\"}\n",
    )
    .unwrap();
    config["output_dir"] = "out2".into();
    let path = write_config(dir.path(), &config);
    assert!(run(&["ingest", "--config", &path]).status.success());
    let summary: Value =
        serde_json::from_slice(&read(dir.path().join("out2/reports/ingest_summary.json"))).unwrap();
    assert_eq!(summary["rejected"], 1);
    assert_eq!(summary["rejections"][0]["id"], "x");
    assert_eq!(summary["slices"][0]["documents"], 1);
}

#[test]
fn table_one_shaped_corpus() {
    let dir = tempdir().unwrap();
    fs::write(
        dir.path().join("dictionary.txt"),
        "neural network\nlearning\n",
    )
    .unwrap();
    // 4,263 documents across 2007–2014, a handful afterwards
    let mut corpus = String::new();
    for i in 0..4263 {
        let year = 2007 + i % 8;
        corpus.push_str(&format!(
            "{{\"id\":\"a{i}\",\"timestamp\":\"{year}-06-{:02}\",\"text\":\"neural network learning\"}}\n",
            1 + i % 28
        ));
    }
    for i in 0..37 {
        corpus.push_str(&format!(
            "{{\"id\":\"b{i}\",\"timestamp\":\"2015-03-01\",\"text\":\"learning\"}}\n"
        ));
    }
    fs::write(dir.path().join("corpus.jsonl"), corpus).unwrap();
    let path = write_config(
        dir.path(),
        &json!({
            "corpus": "corpus.jsonl",
            "dictionary": "dictionary.txt",
            "slices": [
                {"label": "y2007_2014", "start": "2007-01-01", "end": "2015-01-01"},
                {"label": "y2015", "start": "2015-01-01", "end": "2016-01-01"}
            ],
            "dnae": {"hidden_dims": [1]},
            "output_dir": "out"
        }),
    );
    let out = run(&["ingest", "--config", &path]);
    assert!(out.status.success(), "{}", stderr(&out));
    let summary: Value =
        serde_json::from_slice(&read(dir.path().join("out/reports/ingest_summary.json"))).unwrap();
    assert_eq!(summary["slices"][0]["label"], "y2007_2014");
    assert_eq!(summary["slices"][0]["documents"], 4263);
    assert_eq!(summary["slices"][1]["documents"], 37);
}

#[test]
fn large_vocabulary_uses_binary_topic_matrices() {
    let dir = tempdir().unwrap();
    let m = 17_240;
    let terms: Vec<String> = (0..m).map(|i| format!("w{i:05}")).collect();
    fs::write(dir.path().join("dictionary.txt"), terms.join("\n")).unwrap();
    let mut corpus = String::new();
    for d in 0..40 {
        let text: Vec<&str> = (0..50)
            .map(|j| terms[(d * 431 + j * 97) % m].as_str())
            .collect();
        corpus.push_str(&format!(
            "{{\"id\":\"d{d}\",\"timestamp\":\"2020-02-{:02}\",\"text\":\"{}\"}}\n",
            1 + d % 28,
            text.join(" ")
        ));
    }
    fs::write(dir.path().join("corpus.jsonl"), corpus).unwrap();
    let path = write_config(
        dir.path(),
        &json!({
            "corpus": "corpus.jsonl",
            "dictionary": "dictionary.txt",
            "slices": [{"label": "all", "start": "2020-01-01", "end": "2021-01-01"}],
            "window": 1,
            "dnae": {"hidden_dims": [50, 20], "epochs": 1, "batch_size": 20},
            "output_dir": "out"
        }),
    );
    for stage in ["ingest", "train"] {
        let out = run(&[stage, "--config", &path]);
        assert!(out.status.success(), "{}", stderr(&out));
    }
    let bytes = read(dir.path().join("out/U/all.umat"));
    let u = topic_drift_core::diffusion::decode_topic_binary(&bytes).unwrap();
    assert_eq!((u.k(), u.m()), (20, 17_240));
    assert!(!dir.path().join("out/U/all.csv").exists());
}

#[test]
fn exit_codes() {
    let dir = tempdir().unwrap();
    assert_eq!(run(&[]).status.code(), Some(1));
    assert_eq!(run(&["pipeline"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));

    let missing = dir.path().join("nope.json");
    assert_eq!(
        run(&["ingest", "--config", missing.to_str().unwrap()])
            .status
            .code(),
        Some(1)
    );

    let bad = write_config(dir.path(), &json!({"corpus": 3}));
    let out = run(&["ingest", "--config", &bad]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("corpus"));

    let no_corpus = write_config(
        dir.path(),
        &json!({
            "corpus": "absent.jsonl",
            "dictionary": "absent.txt",
            "slices": [{"label": "a", "start": "2020-01-01", "end": "2021-01-01"}],
            "window": 1,
            "dnae": {"hidden_dims": [1]},
            "output_dir": "out"
        }),
    );
    let out = run(&["ingest", "--config", &no_corpus]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("stage ingest failed"));

    let sub = dir.path().join("diverge");
    fs::create_dir(&sub).unwrap();
    let dnae =
        json!({"hidden_dims": [8, 4], "learning_rate": 1e150, "epochs": 5, "init_scale": 0.01});
    let (config, _) = write_planted(&sub, &small(), json!({"dnae": dnae}));
    let out = run(&["pipeline", "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
    let msg = stderr(&out);
    assert!(
        msg.contains("stage train failed") && msg.contains("window s1"),
        "{msg}"
    );
}

#[test]
fn empty_slice_is_carried_through_the_pipeline() {
    let dir = tempdir().unwrap();
    let stream = topic_drift_core::synthetic::planted_drift(&small()).unwrap();
    let mut slices = slices_json(&stream);
    slices
        .as_array_mut()
        .unwrap()
        .push(json!({"label": "s5", "start": "2030-01-01", "end": "2031-01-01"}));
    let (config, _) = write_planted(
        dir.path(),
        &small(),
        json!({"dnae": quick_dnae(5), "slices": slices}),
    );
    let out = run(&["pipeline", "--config", config.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stderr(&out).contains("slice s5 has no documents"));
    let root = dir.path().join("out");
    assert_eq!(
        read(root.join("U/s4.csv")).len(),
        read(root.join("U/s5.csv")).len()
    );
    let csv = String::from_utf8(read(root.join("reports/diffusion.csv"))).unwrap();
    assert!(csv
        .lines()
        .filter(|l| l.contains("s4->s5"))
        .all(|l| l.split(',').nth(2) == Some("0")));
}

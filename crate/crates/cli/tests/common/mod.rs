#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};
use topic_drift_core::synthetic::{planted_drift, PlantedDriftConfig, PlantedStream};

pub fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_topic-drift"))
}

pub fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

pub fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

/// Settings that recover the planted topics of the default stream.
pub fn planted_dnae() -> Value {
    json!({
        "hidden_dims": [8, 4],
        "learning_rate": 0.05,
        "epochs": 300,
        "batch_size": 16,
        "init_scale": 0.1
    })
}

pub fn slices_json(stream: &PlantedStream) -> Value {
    Value::Array(
        stream
            .slices
            .iter()
            .map(|s| json!({"label": s.label, "start": s.start.to_string(), "end": s.end.to_string()}))
            .collect(),
    )
}

/// Writes the planted stream and a config next to it; returns the config
/// path.
pub fn write_planted(
    dir: &Path,
    cfg: &PlantedDriftConfig,
    overrides: Value,
) -> (PathBuf, PlantedStream) {
    let stream = planted_drift(cfg).unwrap();
    std::fs::write(dir.join("corpus.jsonl"), stream.to_jsonl()).unwrap();
    std::fs::write(dir.join("dictionary.txt"), stream.dictionary()).unwrap();
    let mut config = json!({
        "corpus": "corpus.jsonl",
        "dictionary": "dictionary.txt",
        "slices": slices_json(&stream),
        "window": 1,
        "dnae": planted_dnae(),
        "alpha": 0.05,
        "output_dir": "out",
        "seed": 1
    });
    if let Value::Object(extra) = overrides {
        for (k, v) in extra {
            config[k] = v;
        }
    }
    let path = dir.join("config.json");
    std::fs::write(&path, serde_json::to_vec_pretty(&config).unwrap()).unwrap();
    (path, stream)
}

pub fn read(path: impl AsRef<Path>) -> Vec<u8> {
    std::fs::read(path.as_ref()).unwrap_or_else(|e| panic!("{}: {e}", path.as_ref().display()))
}

//! Pipeline configuration: a single JSON document, checked field by field
//! so every error names the offending path.

use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use topic_drift_core::corpus::TimeSlice;
use topic_drift_core::diffusion::CellCount;
use topic_drift_core::dnae::DnaeConfig;

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SliceSpec {
    pub label: String,
    pub start: NaiveDate,
    /// Exclusive.
    pub end: NaiveDate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub corpus: PathBuf,
    pub dictionary: PathBuf,
    #[serde(default)]
    pub aliases: Option<PathBuf>,
    pub slices: Vec<SliceSpec>,
    #[serde(default = "defaults::window")]
    pub window: usize,
    pub dnae: DnaeConfig,
    #[serde(default = "defaults::alpha")]
    pub alpha: f64,
    #[serde(default)]
    pub tau_mass: Option<f64>,
    /// Cell count `N` of the threshold; `null` means `k · t`.
    #[serde(default)]
    pub threshold_cells: Option<usize>,
    #[serde(default = "defaults::top_n")]
    pub top_n: usize,
    /// Terms to chart when `--terms` is not given; `null` charts every term.
    #[serde(default)]
    pub terms: Option<Vec<String>>,
    pub output_dir: PathBuf,
    #[serde(default)]
    pub seed: u64,
}

mod defaults {
    pub fn window() -> usize {
        2
    }
    pub fn alpha() -> f64 {
        0.05
    }
    pub fn top_n() -> usize {
        5
    }
}

fn invalid(path: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Config(anyhow::anyhow!("{path}: {msg}"))
}

fn valid_label(label: &str) -> bool {
    !label.is_empty()
        && label
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

impl PipelineConfig {
    /// Parses and validates. Relative paths are resolved against `base`.
    pub fn from_json(bytes: &[u8], base: &Path) -> Result<Self, CliError> {
        let de = &mut serde_json::Deserializer::from_slice(bytes);
        let mut cfg: PipelineConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            invalid(if path == "." { "config" } else { &path }, e.inner())
        })?;
        for p in [&mut cfg.corpus, &mut cfg.dictionary, &mut cfg.output_dir]
            .into_iter()
            .chain(cfg.aliases.as_mut())
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let bytes = std::fs::read(path).map_err(|e| {
            CliError::Config(anyhow::anyhow!("cannot read {}: {e}", path.display()))
        })?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::from_json(&bytes, base)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.slices.is_empty() {
            return Err(invalid("slices", "at least one slice is required"));
        }
        for (i, s) in self.slices.iter().enumerate() {
            if !valid_label(&s.label) {
                return Err(invalid(
                    &format!("slices[{i}].label"),
                    format!(
                        "{:?} must be non-empty ASCII letters, digits, '_' or '-'",
                        s.label
                    ),
                ));
            }
            if s.start >= s.end {
                return Err(invalid(&format!("slices[{i}].end"), "must be after start"));
            }
            if i > 0 {
                let prev = &self.slices[i - 1];
                if s.start < prev.end {
                    return Err(invalid(
                        &format!("slices[{i}].start"),
                        format!("overlaps or precedes slice {:?}", prev.label),
                    ));
                }
                if self.slices[..i].iter().any(|p| p.label == s.label) {
                    return Err(invalid(
                        &format!("slices[{i}].label"),
                        format!("duplicate label {:?}", s.label),
                    ));
                }
            }
        }
        if self.window == 0 || self.window > self.slices.len() {
            return Err(invalid(
                "window",
                format!("must lie in 1..={}, got {}", self.slices.len(), self.window),
            ));
        }
        self.dnae.validate().map_err(|e| invalid("dnae", e))?;
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(invalid(
                "alpha",
                format!("must lie in (0, 1), got {}", self.alpha),
            ));
        }
        if let Some(t) = self.tau_mass {
            if !(t > 0.0 && t <= 1.0) {
                return Err(invalid("tau_mass", format!("must lie in (0, 1], got {t}")));
            }
        }
        if self.threshold_cells == Some(0) {
            return Err(invalid("threshold_cells", "must be positive"));
        }
        if self.top_n == 0 {
            return Err(invalid("top_n", "must be at least 1"));
        }
        Ok(())
    }

    pub fn time_slices(&self) -> Vec<TimeSlice> {
        self.slices
            .iter()
            .map(|s| TimeSlice::new(s.label.clone(), s.start, s.end))
            .collect()
    }

    /// One label per sliding window, named after its last slice.
    pub fn window_labels(&self) -> Vec<String> {
        self.slices[self.window - 1..]
            .iter()
            .map(|s| s.label.clone())
            .collect()
    }

    /// The autoencoder settings actually used: the pipeline seed wins, and
    /// deterministic mode disables data parallelism.
    pub fn effective_dnae(&self, deterministic: bool) -> DnaeConfig {
        let mut d = self.dnae.clone();
        d.seed = self.seed;
        if deterministic {
            d.parallel = false;
        }
        d
    }

    pub fn cells(&self) -> CellCount {
        match self.threshold_cells {
            Some(n) => CellCount::Fixed(n),
            None => CellCount::TopicsTimesSlices,
        }
    }
}

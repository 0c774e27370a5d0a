use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::PipelineConfig;
use crate::error::{data, CliError};
use crate::layout::{write_atomic, Layout};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    pub name: String,
    pub wall_clock_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowRecord {
    pub label: String,
    pub slices: Vec<String>,
    pub documents: usize,
    pub warm_started_from: Option<String>,
    pub rmse: f64,
    pub rmse_per_epoch: Vec<f64>,
    pub min_weight_per_epoch: Vec<f64>,
    pub checkpoint: String,
    pub u_matrix: String,
}

/// Record of a run, enough to repeat it with the same binary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub config: PipelineConfig,
    pub deterministic: bool,
    pub stages: Vec<StageRecord>,
    pub windows: Vec<WindowRecord>,
}

impl RunManifest {
    pub fn new(config: &PipelineConfig, deterministic: bool) -> Self {
        Self {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            config: config.clone(),
            deterministic,
            stages: Vec::new(),
            windows: Vec::new(),
        }
    }

    /// The manifest already in `layout`, refreshed with the current config,
    /// or a new one.
    pub fn open(layout: &Layout, config: &PipelineConfig, deterministic: bool) -> Self {
        let mut m =
            Self::load(&layout.manifest()).unwrap_or_else(|_| Self::new(config, deterministic));
        m.tool_version = env!("CARGO_PKG_VERSION").to_string();
        m.config = config.clone();
        m.deterministic = deterministic;
        m
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let bytes = crate::layout::read(path)?;
        serde_json::from_slice(&bytes)
            .map_err(|e| data(anyhow::anyhow!("bad manifest {}: {e}", path.display())))
    }

    pub fn record_stage(&mut self, name: &str, wall_clock_ms: f64) {
        self.stages.retain(|s| s.name != name);
        self.stages.push(StageRecord {
            name: name.to_string(),
            wall_clock_ms,
        });
    }

    pub fn save(&self, layout: &Layout) -> Result<(), CliError> {
        let json = serde_json::to_vec_pretty(self).map_err(data)?;
        write_atomic(&layout.manifest(), &json)
    }
}

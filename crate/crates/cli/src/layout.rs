//! Output directory layout, keyed by slice and window labels.

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{data, CliError};

#[derive(Debug, Clone)]
pub struct Layout {
    root: PathBuf,
}

impl Layout {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Self { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn slices_dir(&self) -> PathBuf {
        self.root.join("slices")
    }
    pub fn windows_dir(&self) -> PathBuf {
        self.root.join("windows")
    }
    pub fn checkpoints_dir(&self) -> PathBuf {
        self.root.join("checkpoints")
    }
    pub fn u_dir(&self) -> PathBuf {
        self.root.join("U")
    }
    pub fn reports_dir(&self) -> PathBuf {
        self.root.join("reports")
    }
    pub fn charts_dir(&self) -> PathBuf {
        self.reports_dir().join("charts")
    }

    /// Stem of a slice's count triplets (`.csv` + `.json`).
    pub fn slice_stem(&self, label: &str) -> PathBuf {
        self.slices_dir().join(label)
    }
    pub fn vocabulary(&self) -> PathBuf {
        self.slices_dir().join("vocabulary.txt")
    }
    pub fn window_stem(&self, label: &str) -> PathBuf {
        self.windows_dir().join(label)
    }
    pub fn checkpoint(&self, label: &str) -> PathBuf {
        self.checkpoints_dir().join(format!("{label}.dnae"))
    }
    pub fn u_csv(&self, label: &str) -> PathBuf {
        self.u_dir().join(format!("{label}.csv"))
    }
    pub fn u_binary(&self, label: &str) -> PathBuf {
        self.u_dir().join(format!("{label}.umat"))
    }
    pub fn ingest_summary(&self) -> PathBuf {
        self.reports_dir().join("ingest_summary.json")
    }
    pub fn manifest(&self) -> PathBuf {
        self.reports_dir().join("manifest.json")
    }
    pub fn topics_csv(&self) -> PathBuf {
        self.reports_dir().join("topics.csv")
    }
    pub fn topics_json(&self) -> PathBuf {
        self.reports_dir().join("topics.json")
    }
    pub fn diffusion_csv(&self) -> PathBuf {
        self.reports_dir().join("diffusion.csv")
    }
    pub fn diffusion_report(&self) -> PathBuf {
        self.reports_dir().join("diffusion_report.json")
    }
    pub fn alignment(&self) -> PathBuf {
        self.reports_dir().join("alignment.json")
    }
    pub fn chart(&self, term: &str) -> PathBuf {
        self.charts_dir()
            .join(format!("{}.svg", term.replace(' ', "_")))
    }

    /// Path relative to the output root, for manifests.
    pub fn relative(&self, p: &Path) -> String {
        p.strip_prefix(&self.root)
            .unwrap_or(p)
            .display()
            .to_string()
    }
}

/// Refuses to touch existing outputs unless `force`, in which case they are
/// removed first.
pub fn claim_outputs(paths: &[PathBuf], force: bool) -> Result<(), CliError> {
    let existing: Vec<&PathBuf> = paths.iter().filter(|p| p.exists()).collect();
    if existing.is_empty() {
        return Ok(());
    }
    if !force {
        return Err(CliError::Config(anyhow::anyhow!(
            "refusing to overwrite existing output {} (use --force)",
            existing[0].display()
        )));
    }
    for p in existing {
        let res = if p.is_dir() {
            fs::remove_dir_all(p)
        } else {
            fs::remove_file(p)
        };
        res.map_err(|e| data(anyhow::anyhow!("cannot remove {}: {e}", p.display())))?;
    }
    Ok(())
}

pub fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir)
        .map_err(|e| data(anyhow::anyhow!("cannot create {}: {e}", dir.display())))
}

/// Writes through a temporary sibling and a rename, so readers never see a
/// partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    if let Some(dir) = path.parent() {
        ensure_dir(dir)?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, bytes)
        .and_then(|_| fs::rename(&tmp, path))
        .map_err(|e| data(anyhow::anyhow!("cannot write {}: {e}", path.display())))
}

pub fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|e| data(anyhow::anyhow!("cannot read {}: {e}", path.display())))
}

pub fn read_string(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path)
        .map_err(|e| data(anyhow::anyhow!("cannot read {}: {e}", path.display())))
}

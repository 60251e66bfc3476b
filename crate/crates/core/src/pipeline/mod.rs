//! `ingest → analyze → report` orchestration over flat files.
//!
//! Output tree under `output_dir`:
//!
//! ```text
//! ingest/raw/<subtopic>__<source>.csv        weekly raw volumes
//! ingest/engagement/<subtopic>__<source>.csv weekly engagement (post platforms)
//! ingest/posts_assigned.csv                  in-window posts with subtopic ids
//! ingest/skip_report.json
//! ingest/manifest.json
//! analysis/bundles/<subtopic>__<source>.json one result bundle per pair
//! analysis/summary.csv, analysis/summary.json
//! analysis/manifest.json
//! report/…                                   SVG charts with CSV twins, index.csv
//! ```

mod analyze;
pub mod bundle;
pub mod config;
mod ingest;
pub mod manifest;
mod report;

use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};
use thiserror::Error;

pub use analyze::{
    analyze_pair, cmd_analyze, cmd_analyze_with, AnalyzeOutcome, SourceSummary, Summary,
};
pub use config::{GdeltMode, RunConfig};
pub use ingest::{cmd_ingest, IngestOutcome};
pub use report::{cmd_report, ReportOutcome};

use crate::ingest::IngestError;
use crate::series::{SeriesError, Source};
use crate::taxonomy::TaxonomyError;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("config error: {0}")]
    Config(String),
    #[error("taxonomy: {0}")]
    Taxonomy(#[from] TaxonomyError),
    #[error("{context}: {source}")]
    Ingest {
        context: String,
        #[source]
        source: IngestError,
    },
    #[error("{context}: {source}")]
    Series {
        context: String,
        #[source]
        source: SeriesError,
    },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Data { path: String, message: String },
    #[error("nothing to analyze: {0}")]
    NothingToAnalyze(String),
    #[error("no analysis bundles found under {0}")]
    NothingToReport(String),
}

impl PipelineError {
    /// Process exit code: 2 for usage/config problems, 1 for runtime failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Config(_) | PipelineError::Taxonomy(_) => 2,
            _ => 1,
        }
    }

    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        PipelineError::Io {
            path: path.display().to_string(),
            source,
        }
    }
}

/// Paths inside the output directory.
#[derive(Debug, Clone)]
pub struct Layout {
    pub root: PathBuf,
}

impl Layout {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Layout { root: root.into() }
    }

    pub fn ingest_dir(&self) -> PathBuf {
        self.root.join("ingest")
    }

    pub fn raw_series(&self, subtopic: &str, source: Source) -> PathBuf {
        self.ingest_dir()
            .join("raw")
            .join(format!("{subtopic}__{source}.csv"))
    }

    pub fn engagement_series(&self, subtopic: &str, source: Source) -> PathBuf {
        self.ingest_dir()
            .join("engagement")
            .join(format!("{subtopic}__{source}.csv"))
    }

    pub fn ingest_manifest(&self) -> PathBuf {
        self.ingest_dir().join("manifest.json")
    }

    pub fn analysis_dir(&self) -> PathBuf {
        self.root.join("analysis")
    }

    pub fn bundle(&self, subtopic: &str, source: Source) -> PathBuf {
        self.analysis_dir()
            .join("bundles")
            .join(format!("{subtopic}__{source}.json"))
    }

    pub fn analysis_manifest(&self) -> PathBuf {
        self.analysis_dir().join("manifest.json")
    }

    pub fn report_dir(&self) -> PathBuf {
        self.root.join("report")
    }
}

pub(crate) fn sha256_file(path: &Path) -> Result<String, PipelineError> {
    let bytes = std::fs::read(path).map_err(|e| PipelineError::io(path, e))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

pub(crate) fn write_file(path: &Path, bytes: &[u8]) -> Result<(), PipelineError> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(|e| PipelineError::io(parent, e))?;
    }
    std::fs::write(path, bytes).map_err(|e| PipelineError::io(path, e))
}

pub(crate) fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<(), PipelineError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| PipelineError::Data {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    text.push('\n');
    write_file(path, text.as_bytes())
}

pub(crate) fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, PipelineError> {
    let text = std::fs::read_to_string(path).map_err(|e| PipelineError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| PipelineError::Data {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

/// Removes a generated subdirectory so re-runs never leave stale files.
pub(crate) fn reset_dir(dir: &Path) -> Result<(), PipelineError> {
    if dir.exists() {
        std::fs::remove_dir_all(dir).map_err(|e| PipelineError::io(dir, e))?;
    }
    std::fs::create_dir_all(dir).map_err(|e| PipelineError::io(dir, e))
}

/// Runs all three stages.
pub fn run_all(config: &RunConfig) -> Result<(), PipelineError> {
    cmd_ingest(config)?;
    cmd_analyze(config)?;
    cmd_report(config)?;
    Ok(())
}

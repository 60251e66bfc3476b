//! Run manifests: inputs with content hashes, versions, per-subtopic status
//! and warnings. No timestamps, so identical runs give identical bytes.

use serde::{Deserialize, Serialize};

use crate::series::{Source, Window};

pub const MANIFEST_SCHEMA_VERSION: u32 = 1;
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputEntry {
    pub role: String,
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubtopicStatus {
    pub id: String,
    pub topic: String,
    pub complete: bool,
    /// Sources with a series written.
    pub series: Vec<Source>,
    /// Sources whose input was unavailable.
    pub missing: Vec<Source>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PostStats {
    pub in_window: usize,
    pub assigned: usize,
    pub unassigned: usize,
    pub out_of_window: usize,
    pub row_errors: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestManifest {
    pub schema_version: u32,
    pub tool_version: String,
    pub window: Window,
    pub country: String,
    pub sources: Vec<Source>,
    pub inputs: Vec<InputEntry>,
    pub posts: Option<PostStats>,
    pub subtopics: Vec<SubtopicStatus>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputEntry {
    pub subtopic_id: String,
    pub source: Source,
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Failure {
    pub subtopic_id: String,
    pub source: Source,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalysisManifest {
    pub schema_version: u32,
    pub tool_version: String,
    pub max_lag: usize,
    pub min_episode_len: usize,
    pub ingest_manifest_sha256: String,
    pub bundles: Vec<OutputEntry>,
    pub failures: Vec<Failure>,
    pub warnings: Vec<String>,
}

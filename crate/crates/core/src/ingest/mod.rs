//! Readers for the three evidence sources: post dumps, search-interest
//! exports, and news-volume timelines.

pub mod gdelt;
pub mod posts;
pub mod trends;

use thiserror::Error;

pub use gdelt::{fetch_gdelt_timeline, LiveClient, Transport};
pub use posts::{
    assign_subtopics, read_posts, Platform, PostRecord, PostsRead, RowError, SkipReport,
};
pub use trends::{parse_trends, read_trends_csv};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("schema error: {0}")]
    SchemaError(String),
    #[error("format error at line {line}: {message}")]
    FormatError { line: usize, message: String },
    #[error("value {value} at line {line} is outside 0..=100")]
    RangeError { line: usize, value: i64 },
    #[error("empty file")]
    EmptyFile,
    #[error("empty query")]
    EmptyQuery,
    #[error("network error{}: {cause}", status.map(|s| format!(" (HTTP {s})")).unwrap_or_default())]
    NetworkError { status: Option<u16>, cause: String },
    #[error("unexpected API response: {0}")]
    ApiFormatError(String),
    #[error("no recorded fixture at {0}")]
    FixtureMissing(String),
    #[error(transparent)]
    Window(#[from] crate::series::SeriesError),
}

impl IngestError {
    pub(crate) fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        IngestError::Io {
            path: path.display().to_string(),
            source,
        }
    }
}

//! Post dumps: `platform,posted_at,account_id,followers_at_post,total_engagement,text`.

use std::fmt;
use std::io::Read;
use std::path::Path;
use std::str::FromStr;

use chrono::{DateTime, SubsecRound, Utc};
use serde::{Deserialize, Serialize};

use super::IngestError;
use crate::par;
use crate::series::Window;
use crate::taxonomy::Taxonomy;

pub const POST_COLUMNS: [&str; 6] = [
    "platform",
    "posted_at",
    "account_id",
    "followers_at_post",
    "total_engagement",
    "text",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Platform {
    Facebook,
    Instagram,
    Other,
}

impl Platform {
    pub fn as_str(self) -> &'static str {
        match self {
            Platform::Facebook => "facebook",
            Platform::Instagram => "instagram",
            Platform::Other => "other",
        }
    }
}

impl fmt::Display for Platform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Platform {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "facebook" => Ok(Platform::Facebook),
            "instagram" => Ok(Platform::Instagram),
            "other" => Ok(Platform::Other),
            other => Err(format!("unknown platform '{other}'")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PostRecord {
    pub platform: Platform,
    pub posted_at: DateTime<Utc>,
    pub account_id: String,
    pub followers_at_post: u64,
    /// Likes + comments + shares + reactions.
    pub total_engagement: u64,
    pub text: String,
    pub subtopic_id: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RowError {
    pub line: u64,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SkipReport {
    pub out_of_window: usize,
    pub row_errors: Vec<RowError>,
}

impl SkipReport {
    pub fn skipped(&self) -> usize {
        self.out_of_window + self.row_errors.len()
    }
}

#[derive(Debug, Clone)]
pub struct PostsRead {
    pub records: Vec<PostRecord>,
    pub skips: SkipReport,
}

pub fn read_posts(path: &Path, window: &Window) -> Result<PostsRead, IngestError> {
    let file = std::fs::File::open(path).map_err(|e| IngestError::io(path, e))?;
    read_posts_from(file, window)
}

pub fn read_posts_from<R: Read>(input: R, window: &Window) -> Result<PostsRead, IngestError> {
    let mut reader = csv::ReaderBuilder::new().flexible(true).from_reader(input);
    let headers = reader
        .headers()
        .map_err(|e| IngestError::SchemaError(e.to_string()))?
        .clone();
    let mut index = [0usize; 6];
    let mut missing = Vec::new();
    for (slot, name) in index.iter_mut().zip(POST_COLUMNS) {
        match headers
            .iter()
            .position(|h| h.trim_start_matches('\u{feff}') == name)
        {
            Some(i) => *slot = i,
            None => missing.push(name),
        }
    }
    if !missing.is_empty() {
        return Err(IngestError::SchemaError(format!(
            "missing column(s): {}",
            missing.join(", ")
        )));
    }

    let mut records = Vec::new();
    let mut skips = SkipReport::default();
    for result in reader.records() {
        let rec = match result {
            Ok(rec) => rec,
            Err(e) => {
                let line = e.position().map_or(0, |p| p.line());
                skips.row_errors.push(RowError {
                    line,
                    message: e.to_string(),
                });
                continue;
            }
        };
        let line = rec.position().map_or(0, |p| p.line());
        match parse_row(&rec, &index) {
            Ok(post) => {
                if window.contains(post.posted_at) {
                    records.push(post);
                } else {
                    skips.out_of_window += 1;
                }
            }
            Err(message) => {
                log::debug!("post dump line {line}: {message}");
                skips.row_errors.push(RowError { line, message });
            }
        }
    }
    Ok(PostsRead { records, skips })
}

fn parse_row(rec: &csv::StringRecord, index: &[usize; 6]) -> Result<PostRecord, String> {
    let field = |i: usize| {
        rec.get(index[i])
            .ok_or_else(|| format!("missing field {}", POST_COLUMNS[i]))
    };
    let platform: Platform = field(0)?.parse()?;
    let posted_at = DateTime::parse_from_rfc3339(field(1)?.trim())
        .map_err(|e| format!("bad posted_at '{}': {e}", field(1).unwrap_or_default()))?
        .with_timezone(&Utc)
        .trunc_subsecs(0);
    let count = |i: usize| -> Result<u64, String> {
        let raw = field(i)?.trim();
        match raw.parse::<i64>() {
            Ok(v) if v < 0 => Err(format!("negative {}: {v}", POST_COLUMNS[i])),
            Ok(v) => Ok(v as u64),
            Err(e) => Err(format!("bad {} '{raw}': {e}", POST_COLUMNS[i])),
        }
    };
    Ok(PostRecord {
        platform,
        posted_at,
        account_id: field(2)?.to_string(),
        followers_at_post: count(3)?,
        total_engagement: count(4)?,
        text: field(5)?.to_string(),
        subtopic_id: None,
    })
}

/// Sets each post's subtopic to the first subtopic, in taxonomy order, whose
/// post query matches its text. Non-matching posts get `None`.
pub fn assign_subtopics(posts: Vec<PostRecord>, taxonomy: &Taxonomy) -> Vec<PostRecord> {
    par::map_vec(posts, |mut post| {
        post.subtopic_id = taxonomy.classify_post(&post.text).map(|s| s.id.clone());
        post
    })
}

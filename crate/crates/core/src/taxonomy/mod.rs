//! Topic → subtopic hierarchy and the per-source keyword queries.
//!
//! Taxonomies are loaded from a TOML file:
//!
//! ```toml
//! schema_version = 1
//!
//! [[subtopic]]
//! id = "buildings_green_buildings"
//! name = "Green Buildings"
//! topic = "Buildings"
//! post_query = '"casa green" OR "case green" OR "EPBD"'
//! news_query = '"casa green" OR "case green" OR "EPBD"'
//! trends_spec = "Casa Green"
//! trends_is_topic_entity = false
//! ```
//!
//! Topics are listed in order of first appearance; subtopic order within the
//! file is the tie-break order used when assigning posts.

pub mod query;

use std::collections::HashSet;
use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

pub use query::{parse_query, tokenize, BooleanQuery, QueryError};

pub const TAXONOMY_SCHEMA_VERSION: u32 = 1;

/// The taxonomy shipped with the crate: four topics, eighteen subtopics.
pub const DEFAULT_TAXONOMY_TOML: &str = include_str!("default_taxonomy.toml");

#[derive(Debug, Error)]
pub enum TaxonomyError {
    #[error("cannot read taxonomy {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed taxonomy file: {0}")]
    Format(String),
    #[error("unsupported taxonomy schema_version {0} (expected {TAXONOMY_SCHEMA_VERSION})")]
    SchemaVersion(u32),
    #[error("subtopic '{subtopic}', field '{field}': {message}")]
    ConfigError {
        subtopic: String,
        field: &'static str,
        message: String,
    },
    #[error("duplicate subtopic id '{0}'")]
    DuplicateId(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TrendsSpec {
    /// A search-engine topic entity label.
    TopicEntity(String),
    Keyword(String),
}

impl TrendsSpec {
    pub fn label(&self) -> &str {
        match self {
            TrendsSpec::TopicEntity(s) | TrendsSpec::Keyword(s) => s,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Subtopic {
    pub id: String,
    pub name: String,
    pub post_query: BooleanQuery,
    pub news_query: BooleanQuery,
    pub trends: TrendsSpec,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Topic {
    pub name: String,
    pub subtopics: Vec<Subtopic>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Taxonomy {
    pub topics: Vec<Topic>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    schema_version: u32,
    #[serde(default)]
    subtopic: Vec<RawSubtopic>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSubtopic {
    id: String,
    name: String,
    topic: String,
    post_query: String,
    news_query: String,
    trends_spec: String,
    #[serde(default = "default_true")]
    trends_is_topic_entity: bool,
}

fn default_true() -> bool {
    true
}

impl Taxonomy {
    pub fn from_toml_str(text: &str) -> Result<Self, TaxonomyError> {
        let raw: RawFile =
            toml::from_str(text).map_err(|e| TaxonomyError::Format(e.to_string()))?;
        if raw.schema_version != TAXONOMY_SCHEMA_VERSION {
            return Err(TaxonomyError::SchemaVersion(raw.schema_version));
        }

        let mut seen = HashSet::new();
        let mut topics: Vec<Topic> = Vec::new();
        for (index, entry) in raw.subtopic.into_iter().enumerate() {
            let id = entry.id.trim().to_string();
            if id.is_empty() {
                return Err(TaxonomyError::ConfigError {
                    subtopic: format!("#{}", index + 1),
                    field: "id",
                    message: "empty id".into(),
                });
            }
            if !id
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
            {
                return Err(TaxonomyError::ConfigError {
                    subtopic: id,
                    field: "id",
                    message: "ids may only contain ASCII letters, digits, '_' and '-'".into(),
                });
            }
            if !seen.insert(id.clone()) {
                return Err(TaxonomyError::DuplicateId(id));
            }
            let post_query = parse_field(&id, "post_query", &entry.post_query)?;
            let news_query = parse_field(&id, "news_query", &entry.news_query)?;
            let label = entry.trends_spec.trim().to_string();
            if label.is_empty() {
                return Err(TaxonomyError::ConfigError {
                    subtopic: id,
                    field: "trends_spec",
                    message: "empty trends_spec".into(),
                });
            }
            let trends = if entry.trends_is_topic_entity {
                TrendsSpec::TopicEntity(label)
            } else {
                TrendsSpec::Keyword(label)
            };
            let subtopic = Subtopic {
                id,
                name: entry.name,
                post_query,
                news_query,
                trends,
            };
            match topics.iter_mut().find(|t| t.name == entry.topic) {
                Some(topic) => topic.subtopics.push(subtopic),
                None => topics.push(Topic {
                    name: entry.topic,
                    subtopics: vec![subtopic],
                }),
            }
        }
        Ok(Taxonomy { topics })
    }

    pub fn load(path: &Path) -> Result<Self, TaxonomyError> {
        let text = std::fs::read_to_string(path).map_err(|source| TaxonomyError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml_str(&text)
    }

    pub fn default_bundled() -> Self {
        Self::from_toml_str(DEFAULT_TAXONOMY_TOML).expect("bundled taxonomy is valid")
    }

    /// Subtopics in file order.
    pub fn subtopics(&self) -> impl Iterator<Item = &Subtopic> {
        self.topics.iter().flat_map(|t| t.subtopics.iter())
    }

    pub fn subtopic(&self, id: &str) -> Option<&Subtopic> {
        self.subtopics().find(|s| s.id == id)
    }

    pub fn topic_of(&self, id: &str) -> Option<&str> {
        self.topics
            .iter()
            .find(|t| t.subtopics.iter().any(|s| s.id == id))
            .map(|t| t.name.as_str())
    }

    /// First subtopic (in file order) whose post query matches `text`.
    pub fn classify_post(&self, text: &str) -> Option<&Subtopic> {
        let tokens = tokenize(text);
        self.subtopics()
            .find(|s| s.post_query.matches_tokens(&tokens))
    }
}

pub fn load_taxonomy(path: &Path) -> Result<Taxonomy, TaxonomyError> {
    Taxonomy::load(path)
}

fn parse_field(id: &str, field: &'static str, text: &str) -> Result<BooleanQuery, TaxonomyError> {
    parse_query(text).map_err(|e| TaxonomyError::ConfigError {
        subtopic: id.to_string(),
        field,
        message: e.to_string(),
    })
}

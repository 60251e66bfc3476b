//! Run configuration (`run.toml`).
//!
//! ```toml
//! schema_version = 1
//! taxonomy = "taxonomy.toml"
//! output_dir = "out"
//! window = "2022-12-26..2024-08-12"
//! max_lag = 8
//! min_episode_len = 1
//! sources = ["facebook", "instagram", "gdelt"]
//! country = "IT"
//!
//! [inputs]
//! posts = "posts.csv"
//! trends_dir = "trends"
//!
//! [gdelt]
//! transport = "fixture"   # or "live"
//! fixture_dir = "gdelt"   # live mode records responses here when set
//! ```
//!
//! Relative paths are resolved against the directory holding the file.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use super::PipelineError;
use crate::series::{Source, Window};

pub const RUN_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GdeltMode {
    Live { record_dir: Option<PathBuf> },
    Fixture { dir: PathBuf },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// Directory the config was loaded from; manifest paths are relative to it.
    pub base_dir: PathBuf,
    pub taxonomy: PathBuf,
    pub window: Window,
    pub posts: Option<PathBuf>,
    pub trends_dir: PathBuf,
    pub gdelt: GdeltMode,
    pub country: String,
    pub output_dir: PathBuf,
    pub max_lag: usize,
    pub min_episode_len: usize,
    pub sources: Vec<Source>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    schema_version: u32,
    taxonomy: PathBuf,
    output_dir: PathBuf,
    window: String,
    #[serde(default = "default_max_lag")]
    max_lag: usize,
    #[serde(default = "default_min_len")]
    min_episode_len: usize,
    #[serde(default = "default_sources")]
    sources: Vec<String>,
    #[serde(default = "default_country")]
    country: String,
    inputs: RawInputs,
    gdelt: Option<RawGdelt>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInputs {
    posts: Option<PathBuf>,
    trends_dir: PathBuf,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGdelt {
    transport: String,
    fixture_dir: Option<PathBuf>,
}

fn default_max_lag() -> usize {
    8
}

fn default_min_len() -> usize {
    1
}

fn default_sources() -> Vec<String> {
    Source::SUPPLY
        .iter()
        .map(|s| s.as_str().to_string())
        .collect()
}

fn default_country() -> String {
    "IT".to_string()
}

fn config_err(msg: impl Into<String>) -> PipelineError {
    PipelineError::Config(msg.into())
}

pub fn parse_sources(items: &[String]) -> Result<Vec<Source>, PipelineError> {
    let mut out = Vec::new();
    for item in items {
        let s: Source = item.parse().map_err(config_err)?;
        if s == Source::Trends {
            return Err(config_err(
                "'trends' is the demand source and is always included",
            ));
        }
        if !out.contains(&s) {
            out.push(s);
        }
    }
    out.sort();
    Ok(out)
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, PipelineError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_err(format!("cannot read {}: {e}", path.display())))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::from_toml_str(&text, &base)
    }

    pub fn from_toml_str(text: &str, base_dir: &Path) -> Result<Self, PipelineError> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| config_err(e.to_string()))?;
        if raw.schema_version != RUN_SCHEMA_VERSION {
            return Err(config_err(format!(
                "unsupported schema_version {} (expected {RUN_SCHEMA_VERSION})",
                raw.schema_version
            )));
        }
        let resolve = |p: &Path| base_dir.join(p);
        let window: Window = raw
            .window
            .parse()
            .map_err(|e| config_err(format!("window: {e}")))?;
        let gdelt = match raw.gdelt {
            None => GdeltMode::Live { record_dir: None },
            Some(g) => match g.transport.as_str() {
                "live" => GdeltMode::Live {
                    record_dir: g.fixture_dir.as_deref().map(resolve),
                },
                "fixture" => GdeltMode::Fixture {
                    dir: resolve(g.fixture_dir.as_deref().ok_or_else(|| {
                        config_err("gdelt.fixture_dir is required for fixture transport")
                    })?),
                },
                other => return Err(config_err(format!("unknown gdelt transport '{other}'"))),
            },
        };
        let config = RunConfig {
            base_dir: base_dir.to_path_buf(),
            taxonomy: resolve(&raw.taxonomy),
            window,
            posts: raw.inputs.posts.as_deref().map(resolve),
            trends_dir: resolve(&raw.inputs.trends_dir),
            gdelt,
            country: raw.country,
            output_dir: resolve(&raw.output_dir),
            max_lag: raw.max_lag,
            min_episode_len: raw.min_episode_len,
            sources: parse_sources(&raw.sources)?,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        Window::new(self.window.start, self.window.end).map_err(|e| config_err(e.to_string()))?;
        if self.max_lag < 1 {
            return Err(config_err("max_lag must be at least 1"));
        }
        if self.min_episode_len < 1 {
            return Err(config_err("min_episode_len must be at least 1"));
        }
        if self.max_lag + 2 >= self.window.weeks() {
            return Err(config_err(format!(
                "max_lag {} too large for a {}-week window",
                self.max_lag,
                self.window.weeks()
            )));
        }
        if self.sources.is_empty() {
            return Err(config_err("no supply sources selected"));
        }
        let needs_posts = self.sources.iter().any(|s| s.platform().is_some());
        if needs_posts && self.posts.is_none() {
            return Err(config_err(
                "inputs.posts is required for facebook/instagram sources",
            ));
        }
        if self.country.trim().is_empty() || !self.country.chars().all(|c| c.is_ascii_alphabetic())
        {
            return Err(config_err(format!("bad country code '{}'", self.country)));
        }
        Ok(())
    }

    /// Path shown in manifests: relative to the config directory when possible.
    pub fn display_path(&self, path: &Path) -> String {
        path.strip_prefix(&self.base_dir)
            .unwrap_or(path)
            .to_string_lossy()
            .replace('\\', "/")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
schema_version = 1
taxonomy = "tax.toml"
output_dir = "out"
window = "2022-12-26..2024-08-12"
[inputs]
posts = "posts.csv"
trends_dir = "trends"
[gdelt]
transport = "fixture"
fixture_dir = "gdelt"
"#;

    #[test]
    fn defaults_and_resolution() {
        let c = RunConfig::from_toml_str(MINIMAL, Path::new("/data")).unwrap();
        assert_eq!(c.max_lag, 8);
        assert_eq!(c.min_episode_len, 1);
        assert_eq!(
            c.sources,
            vec![Source::Facebook, Source::Instagram, Source::Gdelt]
        );
        assert_eq!(c.taxonomy, PathBuf::from("/data/tax.toml"));
        assert_eq!(
            c.gdelt,
            GdeltMode::Fixture {
                dir: PathBuf::from("/data/gdelt")
            }
        );
        assert_eq!(
            c.display_path(Path::new("/data/trends/a.csv")),
            "trends/a.csv"
        );
    }

    #[test]
    fn rejects_bad_values() {
        let bad_window = MINIMAL.replace("2022-12-26..", "2022-12-27..");
        assert!(matches!(
            RunConfig::from_toml_str(&bad_window, Path::new(".")),
            Err(PipelineError::Config(_))
        ));
        let bad_lag = MINIMAL.replace("window =", "max_lag = 0\nwindow =");
        assert!(RunConfig::from_toml_str(&bad_lag, Path::new(".")).is_err());
        let unknown = MINIMAL.replace("window =", "colour = 1\nwindow =");
        assert!(RunConfig::from_toml_str(&unknown, Path::new(".")).is_err());
        assert!(RunConfig::from_toml_str("not toml [", Path::new(".")).is_err());
    }
}

use std::path::Path;

use super::manifest::{
    IngestManifest, InputEntry, PostStats, SubtopicStatus, MANIFEST_SCHEMA_VERSION, TOOL_VERSION,
};
use super::{
    reset_dir, sha256_file, write_file, write_json, GdeltMode, Layout, PipelineError, RunConfig,
};
use crate::ingest::gdelt::{fetch_gdelt_timeline, LiveClient, Transport};
use crate::ingest::posts::{assign_subtopics, read_posts, PostRecord};
use crate::ingest::trends::read_trends_csv;
use crate::ingest::IngestError;
use crate::par;
use crate::series::{aggregate_weekly, write_engagement_csv, write_series_csv, RawSeries, Source};
use crate::taxonomy::Taxonomy;

#[derive(Debug, Clone)]
pub struct IngestOutcome {
    pub manifest: IngestManifest,
}

fn series_bytes(series: &RawSeries) -> Vec<u8> {
    let mut buf = Vec::new();
    write_series_csv(&mut buf, series).expect("in-memory write");
    buf
}

fn write_posts_csv(path: &Path, posts: &[PostRecord]) -> Result<(), PipelineError> {
    let mut buf = Vec::new();
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        let header = [
            "platform",
            "posted_at",
            "account_id",
            "followers_at_post",
            "total_engagement",
            "text",
            "subtopic_id",
        ];
        w.write_record(header).expect("in-memory write");
        for p in posts {
            w.write_record([
                p.platform.as_str(),
                &p.posted_at.format("%Y-%m-%dT%H:%M:%SZ").to_string(),
                &p.account_id,
                &p.followers_at_post.to_string(),
                &p.total_engagement.to_string(),
                &p.text,
                p.subtopic_id.as_deref().unwrap_or(""),
            ])
            .expect("in-memory write");
        }
        w.flush().map_err(|e| PipelineError::io(path, e))?;
    }
    write_file(path, &buf)
}

/// Reads every configured source, writes weekly raw series and engagement
/// series, and records inputs, hashes and gaps in the ingest manifest.
///
/// A missing search-interest file or GDELT fixture marks that subtopic
/// incomplete with a warning; malformed inputs abort the run.
pub fn cmd_ingest(config: &RunConfig) -> Result<IngestOutcome, PipelineError> {
    let taxonomy = Taxonomy::load(&config.taxonomy)?;
    let layout = Layout::new(&config.output_dir);
    std::fs::create_dir_all(&config.output_dir).map_err(|e| {
        PipelineError::Config(format!(
            "output directory {}: {e}",
            config.output_dir.display()
        ))
    })?;
    reset_dir(&layout.ingest_dir())?;

    let mut inputs = vec![InputEntry {
        role: "taxonomy".into(),
        path: config.display_path(&config.taxonomy),
        sha256: sha256_file(&config.taxonomy)?,
    }];
    let mut warnings = Vec::new();
    let subtopics: Vec<_> = taxonomy.subtopics().collect();
    let mut status: Vec<SubtopicStatus> = subtopics
        .iter()
        .map(|s| SubtopicStatus {
            id: s.id.clone(),
            topic: taxonomy.topic_of(&s.id).unwrap_or_default().to_string(),
            complete: true,
            series: Vec::new(),
            missing: Vec::new(),
        })
        .collect();

    // Posts → facebook/instagram supply and engagement.
    let post_sources: Vec<Source> = config
        .sources
        .iter()
        .copied()
        .filter(|s| s.platform().is_some())
        .collect();
    let mut post_stats = None;
    if !post_sources.is_empty() {
        let path = config.posts.as_ref().expect("validated");
        let read = read_posts(path, &config.window).map_err(|source| PipelineError::Ingest {
            context: config.display_path(path),
            source,
        })?;
        inputs.push(InputEntry {
            role: "posts".into(),
            path: config.display_path(path),
            sha256: sha256_file(path)?,
        });
        for e in &read.skips.row_errors {
            warnings.push(format!(
                "{}:{}: {}",
                config.display_path(path),
                e.line,
                e.message
            ));
        }
        let posts = assign_subtopics(read.records, &taxonomy);
        let assigned = posts.iter().filter(|p| p.subtopic_id.is_some()).count();
        post_stats = Some(PostStats {
            in_window: posts.len(),
            assigned,
            unassigned: posts.len() - assigned,
            out_of_window: read.skips.out_of_window,
            row_errors: read.skips.row_errors.len(),
        });
        write_json(&layout.ingest_dir().join("skip_report.json"), &read.skips)?;
        write_posts_csv(&layout.ingest_dir().join("posts_assigned.csv"), &posts)?;

        let pairs: Vec<(usize, Source)> = (0..subtopics.len())
            .flat_map(|i| post_sources.iter().map(move |&s| (i, s)))
            .collect();
        let built = par::map_slice_with(par::Execution::default(), &pairs, |&(i, source)| {
            aggregate_weekly(&posts, &subtopics[i].id, source, &config.window).map(|(raw, eng)| {
                let mut eng_bytes = Vec::new();
                write_engagement_csv(&mut eng_bytes, &eng).expect("in-memory write");
                (i, source, series_bytes(&raw), eng_bytes)
            })
        });
        for item in built {
            let (i, source, raw, eng) = item.map_err(|source| PipelineError::Series {
                context: "weekly aggregation".into(),
                source,
            })?;
            let id = &subtopics[i].id;
            write_file(&layout.raw_series(id, source), &raw)?;
            write_file(&layout.engagement_series(id, source), &eng)?;
            status[i].series.push(source);
        }
    }

    // Search interest (demand).
    for (i, sub) in subtopics.iter().enumerate() {
        let path = config.trends_dir.join(format!("{}.csv", sub.id));
        if !path.is_file() {
            warnings.push(format!(
                "{}: missing search-interest export; subtopic marked incomplete",
                config.display_path(&path)
            ));
            status[i].complete = false;
            status[i].missing.push(Source::Trends);
            continue;
        }
        let series = read_trends_csv(&path).map_err(|source| PipelineError::Ingest {
            context: config.display_path(&path),
            source,
        })?;
        let series = RawSeries {
            subtopic_id: sub.id.clone(),
            ..series
        };
        inputs.push(InputEntry {
            role: "trends".into(),
            path: config.display_path(&path),
            sha256: sha256_file(&path)?,
        });
        write_file(
            &layout.raw_series(&sub.id, Source::Trends),
            &series_bytes(&series),
        )?;
        status[i].series.push(Source::Trends);
    }

    // News volume.
    if config.sources.contains(&Source::Gdelt) {
        let results: Vec<Result<RawSeries, IngestError>> = match &config.gdelt {
            GdeltMode::Fixture { dir } => {
                let transport = Transport::Fixture(dir);
                par::map_slice_with(par::Execution::default(), &subtopics, |sub| {
                    fetch_gdelt_timeline(
                        &sub.news_query,
                        &config.country,
                        &config.window,
                        &transport,
                        &sub.id,
                    )
                })
            }
            GdeltMode::Live { record_dir } => {
                let mut client = LiveClient::new();
                if let Some(dir) = record_dir {
                    client = client.record_to(dir);
                }
                let transport = Transport::Live(&client);
                subtopics
                    .iter()
                    .map(|sub| {
                        fetch_gdelt_timeline(
                            &sub.news_query,
                            &config.country,
                            &config.window,
                            &transport,
                            &sub.id,
                        )
                    })
                    .collect()
            }
        };
        for (i, result) in results.into_iter().enumerate() {
            let id = &subtopics[i].id;
            match result {
                Ok(series) => {
                    write_file(
                        &layout.raw_series(id, Source::Gdelt),
                        &series_bytes(&series),
                    )?;
                    status[i].series.push(Source::Gdelt);
                }
                Err(IngestError::FixtureMissing(path)) => {
                    warnings.push(format!(
                        "{id}: no recorded news timeline ({path}); subtopic marked incomplete"
                    ));
                    status[i].complete = false;
                    status[i].missing.push(Source::Gdelt);
                }
                Err(source) => {
                    return Err(PipelineError::Ingest {
                        context: format!("news timeline for {id}"),
                        source,
                    })
                }
            }
        }
        if let GdeltMode::Fixture { dir } = &config.gdelt {
            inputs.push(InputEntry {
                role: "gdelt_fixtures".into(),
                path: config.display_path(dir),
                sha256: hash_dir(dir)?,
            });
        }
    }

    for s in &mut status {
        s.series.sort();
    }
    for w in &warnings {
        log::warn!("{w}");
    }
    let manifest = IngestManifest {
        schema_version: MANIFEST_SCHEMA_VERSION,
        tool_version: TOOL_VERSION.to_string(),
        window: config.window,
        country: config.country.clone(),
        sources: config.sources.clone(),
        inputs,
        posts: post_stats,
        subtopics: status,
        warnings,
    };
    write_json(&layout.ingest_manifest(), &manifest)?;
    Ok(IngestOutcome { manifest })
}

/// Hash over the sorted file names and contents of a directory.
fn hash_dir(dir: &Path) -> Result<String, PipelineError> {
    use sha2::{Digest, Sha256};
    let mut names: Vec<_> = std::fs::read_dir(dir)
        .map_err(|e| PipelineError::io(dir, e))?
        .filter_map(|e| e.ok())
        .filter(|e| e.path().is_file())
        .map(|e| e.file_name())
        .collect();
    names.sort();
    let mut hasher = Sha256::new();
    for name in names {
        let path = dir.join(&name);
        hasher.update(name.to_string_lossy().as_bytes());
        hasher.update([0]);
        hasher.update(std::fs::read(&path).map_err(|e| PipelineError::io(&path, e))?);
    }
    Ok(hex::encode(hasher.finalize()))
}

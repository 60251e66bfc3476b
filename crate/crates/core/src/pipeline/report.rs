use std::collections::BTreeMap;
use std::path::PathBuf;

use super::bundle::Bundle;
use super::manifest::AnalysisManifest;
use super::{read_json, reset_dir, write_file, Layout, PipelineError, RunConfig};
use crate::report::{cumulative_chart, delta_chart, engagement_chart, timeseries_chart, Chart};
use crate::series::Source;

#[derive(Debug, Clone)]
pub struct ReportOutcome {
    /// Files written, relative to the report directory, in index order.
    pub files: Vec<String>,
    /// Charts deliberately left out, with the reason.
    pub omitted: Vec<(String, String)>,
}

struct IndexRow {
    file: String,
    kind: &'static str,
    subtopic: String,
    source: Source,
    note: String,
}

/// Renders charts for every bundle listed in the analysis manifest.
pub fn cmd_report(config: &RunConfig) -> Result<ReportOutcome, PipelineError> {
    let layout = Layout::new(&config.output_dir);
    let manifest_path = layout.analysis_manifest();
    if !manifest_path.is_file() {
        return Err(PipelineError::NothingToReport(
            layout.analysis_dir().display().to_string(),
        ));
    }
    let manifest: AnalysisManifest = read_json(&manifest_path)?;
    if manifest.bundles.is_empty() {
        return Err(PipelineError::NothingToReport(
            layout.analysis_dir().display().to_string(),
        ));
    }
    let mut bundles = Vec::with_capacity(manifest.bundles.len());
    for entry in &manifest.bundles {
        let path: PathBuf = layout.root.join(&entry.path);
        let b: Bundle = read_json(&path)?;
        bundles.push(b);
    }

    let dir = layout.report_dir();
    reset_dir(&dir)?;
    let mut rows: Vec<IndexRow> = Vec::new();
    let mut omitted = Vec::new();
    let mut emit = |name: String,
                    chart: Chart,
                    kind: &'static str,
                    subtopic: &str,
                    source: Source,
                    note: String| {
        write_file(&dir.join(format!("{name}.svg")), chart.svg.as_bytes())?;
        write_file(&dir.join(format!("{name}.csv")), chart.csv.as_bytes())?;
        for ext in ["svg", "csv"] {
            rows.push(IndexRow {
                file: format!("{name}.{ext}"),
                kind,
                subtopic: subtopic.to_string(),
                source,
                note: note.clone(),
            });
        }
        Ok::<(), PipelineError>(())
    };

    for b in &bundles {
        let stem = format!("{}__{}", b.subtopic_id, b.supply_source);
        emit(
            format!("timeseries__{stem}"),
            timeseries_chart(b),
            "timeseries",
            &b.subtopic_id,
            b.supply_source,
            String::new(),
        )?;
        let episodes = b.episodes.len();
        emit(
            format!("delta__{stem}"),
            delta_chart(b),
            "delta",
            &b.subtopic_id,
            b.supply_source,
            format!("{episodes} episodes"),
        )?;
        match engagement_chart(b) {
            Some(chart) => emit(
                format!("engagement__{stem}"),
                chart,
                "engagement",
                &b.subtopic_id,
                b.supply_source,
                String::new(),
            )?,
            None => {
                let why = b
                    .engagement_r_note
                    .clone()
                    .unwrap_or_else(|| "engagement not available".into());
                omitted.push((format!("engagement__{stem}"), why));
            }
        }
    }

    let mut by_source: BTreeMap<&str, (Source, Vec<&Bundle>)> = BTreeMap::new();
    for b in &bundles {
        by_source
            .entry(b.supply_source.as_str())
            .or_insert_with(|| (b.supply_source, Vec::new()))
            .1
            .push(b);
    }
    for (name, (source, list)) in &by_source {
        let mut list = list.clone();
        list.sort_by(|a, b| a.subtopic_id.cmp(&b.subtopic_id));
        emit(
            format!("cumulative__{name}"),
            cumulative_chart(*source, &list),
            "cumulative",
            "",
            *source,
            String::new(),
        )?;
    }

    let mut index = csv::Writer::from_writer(Vec::new());
    index
        .write_record(["file", "kind", "subtopic_id", "source", "note"])
        .expect("in-memory write");
    for r in &rows {
        index
            .write_record([
                r.file.as_str(),
                r.kind,
                &r.subtopic,
                r.source.as_str(),
                &r.note,
            ])
            .expect("in-memory write");
    }
    for (name, why) in &omitted {
        let (kind, rest) = name.split_once("__").unwrap_or(("", name));
        let (subtopic, source) = rest.rsplit_once("__").unwrap_or((rest, ""));
        index
            .write_record(["", kind, subtopic, source, &format!("omitted: {why}")])
            .expect("in-memory write");
    }
    let index = index.into_inner().expect("in-memory write");
    write_file(&dir.join("index.csv"), &index)?;

    let mut files: Vec<String> = rows.into_iter().map(|r| r.file).collect();
    files.push("index.csv".into());
    Ok(ReportOutcome { files, omitted })
}

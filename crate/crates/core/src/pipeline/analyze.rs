use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;

use super::bundle::{
    reason_str, Bundle, Comparator, CumulativeBlock, DemandBlock, EngagementBlock, EpisodeOut,
    OlsBlock, SupplyBlock, BUNDLE_SCHEMA_VERSION,
};
use super::manifest::{
    AnalysisManifest, Failure, IngestManifest, OutputEntry, MANIFEST_SCHEMA_VERSION, TOOL_VERSION,
};
use super::{
    read_json, reset_dir, sha256_file, write_file, write_json, Layout, PipelineError, RunConfig,
};
use crate::analysis::{
    cross_correlation, delta, detect_episodes, engagement_correlation, engagement_design,
    log_engagement, ols_fit, thresholds, AnalysisError, Correlation, DesignMatrix, OlsFit,
    LAG_CONVENTION,
};
use crate::fmt::{fixed6, Fixed6};
use crate::par::{self, Execution};
use crate::series::{
    align, cumulative, overlap, read_engagement_csv, read_series_csv, rescale, EngagementSeries,
    NormalizedSeries, RawSeries, Source,
};

#[derive(Debug, Clone)]
pub struct AnalyzeOutcome {
    pub bundles: Vec<Bundle>,
    pub failures: Vec<Failure>,
    pub summary: Summary,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PooledOls {
    pub source: Source,
    pub fit: Option<OlsBlock>,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SourceSummary {
    /// `None` for the pooled summary over all sources.
    pub source: Option<Source>,
    pub bundles: usize,
    /// Mean of lag-0 correlations over bundles where it is defined.
    pub mean_lag0_r: Option<Fixed6>,
    /// Mean of peak correlations over bundles with a defined peak.
    pub mean_peak_r: Option<Fixed6>,
    pub modal_peak_lag: Option<i32>,
    /// Peak lag → number of bundles.
    pub peak_lag_counts: BTreeMap<i32, usize>,
    pub demand_exceeds_supply: Vec<String>,
    pub supply_exceeds_demand: Vec<String>,
    pub equal: Vec<String>,
    pub pooled_engagement_ols: Option<PooledOls>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub lag_convention: String,
    pub overall: SourceSummary,
    pub per_source: Vec<SourceSummary>,
}

struct PairResult {
    bundle: Bundle,
    design: Option<(Vec<f64>, DesignMatrix)>,
}

fn load_series(path: &Path) -> Result<RawSeries, PipelineError> {
    let file = std::fs::File::open(path).map_err(|e| PipelineError::io(path, e))?;
    read_series_csv(file).map_err(|source| PipelineError::Series {
        context: path.display().to_string(),
        source,
    })
}

fn load_engagement(path: &Path) -> Result<EngagementSeries, PipelineError> {
    let file = std::fs::File::open(path).map_err(|e| PipelineError::io(path, e))?;
    read_engagement_csv(file).map_err(|source| PipelineError::Series {
        context: path.display().to_string(),
        source,
    })
}

fn analysis_err(context: &str, e: AnalysisError) -> PipelineError {
    PipelineError::Data {
        path: context.to_string(),
        message: e.to_string(),
    }
}

fn restrict(
    series: &NormalizedSeries,
    first_week: chrono::NaiveDate,
    values: Vec<u8>,
) -> NormalizedSeries {
    NormalizedSeries {
        subtopic_id: series.subtopic_id.clone(),
        source: series.source,
        first_week,
        values,
        degenerate: series.degenerate,
    }
}

/// Full analysis of one supply source against search-interest demand.
///
/// Supply is rescaled over its whole series before the two are restricted
/// to their common weeks.
pub fn analyze_pair(
    layout: &Layout,
    subtopic_id: &str,
    topic: &str,
    source: Source,
    max_lag: usize,
    min_episode_len: usize,
) -> Result<Bundle, PipelineError> {
    analyze_pair_inner(layout, subtopic_id, topic, source, max_lag, min_episode_len)
        .map(|r| r.bundle)
}

fn analyze_pair_inner(
    layout: &Layout,
    subtopic_id: &str,
    topic: &str,
    source: Source,
    max_lag: usize,
    min_episode_len: usize,
) -> Result<PairResult, PipelineError> {
    let context = format!("{subtopic_id}/{source}");
    let supply_raw = load_series(&layout.raw_series(subtopic_id, source))?;
    let demand_raw = load_series(&layout.raw_series(subtopic_id, Source::Trends))?;
    let supply_norm = rescale(&supply_raw);
    let demand_norm =
        NormalizedSeries::from_percent(&demand_raw).map_err(|source| PipelineError::Series {
            context: context.clone(),
            source,
        })?;
    let aligned = align(&supply_norm, &demand_norm).map_err(|source| PipelineError::Series {
        context: context.clone(),
        source,
    })?;
    let supply = restrict(&supply_norm, aligned.first_week, aligned.a.clone());
    let demand = restrict(&demand_norm, aligned.first_week, aligned.b.clone());
    let weeks = supply.values.len();
    let (offset, _, _, _) = overlap(
        supply_raw.first_week,
        supply_raw.values.len(),
        aligned.first_week,
        weeks,
    )
    .expect("aligned weeks lie inside the supply series");

    let delta_series = delta(&supply, &demand).map_err(|e| analysis_err(&context, e))?;
    let th = thresholds(&supply, &demand);
    let episodes = detect_episodes(&delta_series, &th, min_episode_len);
    let x: Vec<f64> = supply.values.iter().map(|&v| v as f64).collect();
    let y: Vec<f64> = demand.values.iter().map(|&v| v as f64).collect();
    let lag_correlation =
        cross_correlation(&x, &y, max_lag).map_err(|e| analysis_err(&context, e))?;
    let lag0_r = lag_correlation
        .at(0)
        .and_then(Correlation::value)
        .map(Fixed6);
    let cum_supply = cumulative(&supply);
    let cum_demand = cumulative(&demand);

    let mut engagement = None;
    let mut engagement_r = None;
    let mut engagement_r_note = Some("not applicable: source has no engagement data".to_string());
    let mut ols = None;
    let mut ols_note = Some("not applicable: source has no engagement data".to_string());
    let mut design = None;
    if source.platform().is_some() {
        let full = load_engagement(&layout.engagement_series(subtopic_id, source))?;
        let (off, _, len, _) = overlap(full.first_week, full.len(), aligned.first_week, weeks)
            .ok_or_else(|| PipelineError::Data {
                path: context.clone(),
                message: "engagement series does not cover the analysis weeks".into(),
            })?;
        if len != weeks {
            return Err(PipelineError::Data {
                path: context.clone(),
                message: "engagement series does not cover the analysis weeks".into(),
            });
        }
        let eng = EngagementSeries {
            subtopic_id: full.subtopic_id.clone(),
            source: full.source,
            first_week: aligned.first_week,
            engagement_sum: full.engagement_sum[off..off + len].to_vec(),
            post_count: full.post_count[off..off + len].to_vec(),
            followers_sum: full.followers_sum[off..off + len].to_vec(),
        };
        match engagement_correlation(&delta_series, &eng).map_err(|e| analysis_err(&context, e))? {
            Correlation::Defined(r) => {
                engagement_r = Some(Fixed6(r));
                engagement_r_note = None;
            }
            Correlation::Undefined(reason) => {
                engagement_r_note = Some(format!("undefined: {}", reason_str(reason)));
            }
        }
        let (yv, xm) =
            engagement_design(&delta_series, &eng).map_err(|e| analysis_err(&context, e))?;
        match ols_fit(&yv, &xm) {
            Ok(fit) => {
                ols = Some(OlsBlock::engagement(&fit));
                ols_note = None;
            }
            Err(e) => ols_note = Some(format!("not fitted: {e}")),
        }
        design = Some((yv, xm));
        engagement = Some(EngagementBlock {
            log_engagement: eng
                .engagement_sum
                .iter()
                .map(|&v| Fixed6(log_engagement(v)))
                .collect(),
            post_count: eng.post_count.clone(),
        });
    }

    let bundle = Bundle {
        schema_version: BUNDLE_SCHEMA_VERSION,
        subtopic_id: subtopic_id.to_string(),
        topic: topic.to_string(),
        supply_source: source,
        first_week: aligned.first_week,
        weeks,
        supply: SupplyBlock {
            raw: supply_raw.values[offset..offset + weeks].to_vec(),
            normalized: supply.values.clone(),
            degenerate: supply_norm.degenerate,
        },
        demand: DemandBlock {
            normalized: demand.values.clone(),
        },
        cumulative: CumulativeBlock {
            supply: cum_supply,
            demand: cum_demand,
            comparator: Comparator::of(cum_supply, cum_demand),
        },
        delta: delta_series.values.clone(),
        thresholds: th.into(),
        min_episode_len,
        episodes: episodes.iter().map(EpisodeOut::from).collect(),
        lag_correlation,
        lag0_r,
        engagement,
        engagement_r,
        engagement_r_note,
        ols,
        ols_note,
    };
    Ok(PairResult { bundle, design })
}

/// Most frequent peak lag; ties go to the smaller |lag|, then the negative one.
fn modal_lag(counts: &BTreeMap<i32, usize>) -> Option<i32> {
    counts
        .iter()
        .max_by(|(ka, ca), (kb, cb)| {
            ca.cmp(cb)
                .then_with(|| kb.abs().cmp(&ka.abs()))
                .then_with(|| kb.cmp(ka))
        })
        .map(|(&k, _)| k)
}

fn mean_of(values: impl Iterator<Item = f64>) -> Option<Fixed6> {
    let v: Vec<f64> = values.collect();
    (!v.is_empty()).then(|| Fixed6(v.iter().sum::<f64>() / v.len() as f64))
}

fn summarize(source: Option<Source>, results: &[&PairResult]) -> SourceSummary {
    let bundles: Vec<&Bundle> = results.iter().map(|r| &r.bundle).collect();
    let mut peak_lag_counts = BTreeMap::new();
    for b in &bundles {
        if let Some(k) = b.lag_correlation.peak_lag() {
            *peak_lag_counts.entry(k).or_insert(0) += 1;
        }
    }
    let ids = |c: Comparator| {
        bundles
            .iter()
            .filter(|b| b.cumulative.comparator == c)
            .map(|b| b.subtopic_id.clone())
            .collect::<Vec<_>>()
    };
    let pooled_engagement_ols = source.filter(|s| s.platform().is_some()).map(|source| {
        let mut y = Vec::new();
        let mut rows = Vec::new();
        for r in results {
            if let Some((yv, xm)) = &r.design {
                y.extend_from_slice(yv);
                rows.extend((0..xm.rows()).map(|i| xm.row(i).to_vec()));
            }
        }
        let fit: Result<OlsFit, AnalysisError> =
            DesignMatrix::from_rows(rows).and_then(|x| ols_fit(&y, &x));
        match fit {
            Ok(fit) => PooledOls {
                source,
                fit: Some(OlsBlock::engagement(&fit)),
                note: None,
            },
            Err(e) => PooledOls {
                source,
                fit: None,
                note: Some(format!("not fitted: {e}")),
            },
        }
    });
    SourceSummary {
        source,
        bundles: bundles.len(),
        mean_lag0_r: mean_of(bundles.iter().filter_map(|b| b.lag0_r.map(|f| f.0))),
        mean_peak_r: mean_of(bundles.iter().filter_map(|b| b.lag_correlation.peak_r())),
        modal_peak_lag: modal_lag(&peak_lag_counts),
        peak_lag_counts,
        demand_exceeds_supply: ids(Comparator::DemandExceedsSupply),
        supply_exceeds_demand: ids(Comparator::SupplyExceedsDemand),
        equal: ids(Comparator::Equal),
        pooled_engagement_ols,
    }
}

fn opt6(v: Option<f64>) -> String {
    v.map(fixed6).unwrap_or_default()
}

fn summary_csv(bundles: &[Bundle]) -> Vec<u8> {
    let mut buf = Vec::new();
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        w.write_record([
            "subtopic_id",
            "topic",
            "source",
            "weeks",
            "cumulative_supply",
            "cumulative_demand",
            "comparator",
            "threshold_upper",
            "threshold_lower",
            "void_episodes",
            "void_weeks",
            "overabundance_episodes",
            "overabundance_weeks",
            "lag0_r",
            "peak_lag",
            "peak_r",
            "engagement_r",
        ])
        .expect("in-memory write");
        for b in bundles {
            let (mut nv, mut wv, mut no, mut wo) = (0, 0, 0, 0);
            for e in &b.episodes {
                match e.kind {
                    crate::analysis::EpisodeKind::Void => {
                        nv += 1;
                        wv += e.weeks;
                    }
                    crate::analysis::EpisodeKind::Overabundance => {
                        no += 1;
                        wo += e.weeks;
                    }
                }
            }
            w.write_record([
                b.subtopic_id.clone(),
                b.topic.clone(),
                b.supply_source.to_string(),
                b.weeks.to_string(),
                b.cumulative.supply.to_string(),
                b.cumulative.demand.to_string(),
                b.cumulative.comparator.as_str().to_string(),
                fixed6(b.thresholds.upper.0),
                fixed6(b.thresholds.lower.0),
                nv.to_string(),
                wv.to_string(),
                no.to_string(),
                wo.to_string(),
                opt6(b.lag0_r.map(|f| f.0)),
                b.lag_correlation
                    .peak_lag()
                    .map(|k| k.to_string())
                    .unwrap_or_default(),
                opt6(b.lag_correlation.peak_r()),
                opt6(b.engagement_r.map(|f| f.0)),
            ])
            .expect("in-memory write");
        }
        w.flush().expect("in-memory write");
    }
    buf
}

/// Analyzes every (subtopic, supply source) pair with ingested data, writing
/// one bundle per pair plus cross-subtopic summaries. A failing pair is
/// recorded in the manifest and does not affect the others.
pub fn cmd_analyze(config: &RunConfig) -> Result<AnalyzeOutcome, PipelineError> {
    cmd_analyze_with(config, Execution::default())
}

pub fn cmd_analyze_with(
    config: &RunConfig,
    exec: Execution,
) -> Result<AnalyzeOutcome, PipelineError> {
    let layout = Layout::new(&config.output_dir);
    let manifest_path = layout.ingest_manifest();
    if !manifest_path.is_file() {
        return Err(PipelineError::NothingToAnalyze(format!(
            "no ingest manifest at {}",
            manifest_path.display()
        )));
    }
    let ingest: IngestManifest = read_json(&manifest_path)?;
    let mut warnings = Vec::new();
    let mut pairs = Vec::new();
    for st in &ingest.subtopics {
        if !st.series.contains(&Source::Trends) {
            warnings.push(format!("{}: no demand series, skipped", st.id));
            continue;
        }
        for &source in &config.sources {
            if st.series.contains(&source) {
                pairs.push((st.id.clone(), st.topic.clone(), source));
            } else {
                warnings.push(format!("{}: no {source} series, skipped", st.id));
            }
        }
    }
    if pairs.is_empty() {
        return Err(PipelineError::NothingToAnalyze(
            "no subtopic has both a supply and a demand series".into(),
        ));
    }

    let results = par::map_slice_with(exec, &pairs, |(id, topic, source)| {
        analyze_pair_inner(
            &layout,
            id,
            topic,
            *source,
            config.max_lag,
            config.min_episode_len,
        )
    });

    reset_dir(&layout.analysis_dir())?;
    let mut ok: Vec<PairResult> = Vec::new();
    let mut failures = Vec::new();
    let mut entries = Vec::new();
    for ((id, _, source), result) in pairs.iter().zip(results) {
        match result {
            Ok(r) => {
                let path = layout.bundle(id, *source);
                write_json(&path, &r.bundle)?;
                entries.push(OutputEntry {
                    subtopic_id: id.clone(),
                    source: *source,
                    path: path
                        .strip_prefix(&layout.root)
                        .unwrap_or(&path)
                        .to_string_lossy()
                        .replace('\\', "/"),
                    sha256: sha256_file(&path)?,
                });
                ok.push(r);
            }
            Err(e) => {
                log::warn!("{id}/{source}: {e}");
                failures.push(Failure {
                    subtopic_id: id.clone(),
                    source: *source,
                    error: e.to_string(),
                });
            }
        }
    }

    let all: Vec<&PairResult> = ok.iter().collect();
    let per_source = config
        .sources
        .iter()
        .map(|&s| {
            let subset: Vec<&PairResult> =
                ok.iter().filter(|r| r.bundle.supply_source == s).collect();
            summarize(Some(s), &subset)
        })
        .collect();
    let summary = Summary {
        lag_convention: LAG_CONVENTION.to_string(),
        overall: summarize(None, &all),
        per_source,
    };
    let bundles: Vec<Bundle> = ok.into_iter().map(|r| r.bundle).collect();
    write_file(
        &layout.analysis_dir().join("summary.csv"),
        &summary_csv(&bundles),
    )?;
    write_json(&layout.analysis_dir().join("summary.json"), &summary)?;

    for w in &warnings {
        log::warn!("{w}");
    }
    let manifest = AnalysisManifest {
        schema_version: MANIFEST_SCHEMA_VERSION,
        tool_version: TOOL_VERSION.to_string(),
        max_lag: config.max_lag,
        min_episode_len: config.min_episode_len,
        ingest_manifest_sha256: sha256_file(&manifest_path)?,
        bundles: entries,
        failures: failures.clone(),
        warnings,
    };
    write_json(&layout.analysis_manifest(), &manifest)?;
    if bundles.is_empty() {
        return Err(PipelineError::NothingToAnalyze(format!(
            "all {} pairs failed; see {}",
            failures.len(),
            layout.analysis_manifest().display()
        )));
    }
    Ok(AnalyzeOutcome {
        bundles,
        failures,
        summary,
    })
}

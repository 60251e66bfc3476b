mod common;

use std::collections::BTreeSet;

use common::{corpus_config, read_tree};
use infodelta::pipeline::bundle::Bundle;
use infodelta::pipeline::{cmd_analyze_with, cmd_ingest, cmd_report, run_all, PipelineError};
use infodelta::report::{delta_chart, engagement_chart, timeseries_chart};
use infodelta::Execution;

fn load_bundle(root: &std::path::Path, name: &str) -> Bundle {
    let text = std::fs::read_to_string(root.join("analysis/bundles").join(name)).unwrap();
    serde_json::from_str(&text).unwrap()
}

#[test]
fn every_svg_is_well_formed_and_indexed() {
    let tmp = tempfile::tempdir().unwrap();
    run_all(&corpus_config(tmp.path())).unwrap();
    let report = tmp.path().join("report");
    let mut on_disk = BTreeSet::new();
    for entry in std::fs::read_dir(&report).unwrap() {
        let path = entry.unwrap().path();
        let name = path.file_name().unwrap().to_string_lossy().into_owned();
        if name.ends_with(".svg") {
            let text = std::fs::read_to_string(&path).unwrap();
            let doc = roxmltree::Document::parse(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert_eq!(doc.root_element().tag_name().name(), "svg");
            assert!(doc.descendants().any(|n| n.has_tag_name("text")));
        }
        if name != "index.csv" {
            on_disk.insert(name);
        }
    }
    let index = std::fs::read_to_string(report.join("index.csv")).unwrap();
    let listed: BTreeSet<String> = index
        .lines()
        .skip(1)
        .map(|l| l.split(',').next().unwrap().to_string())
        .filter(|f| !f.is_empty())
        .collect();
    assert_eq!(listed, on_disk);
    // 54 bundles × (timeseries + delta), 36 platform engagement charts, 3 cumulative; SVG and CSV each.
    assert_eq!(on_disk.len(), 2 * (54 * 2 + 36 + 3));
}

#[test]
fn undefined_engagement_chart_is_omitted() {
    let tmp = tempfile::tempdir().unwrap();
    run_all(&corpus_config(tmp.path())).unwrap();
    let mut b = load_bundle(tmp.path(), "cars_fuel__facebook.json");
    assert!(engagement_chart(&b).is_some());
    b.engagement_r = None;
    b.engagement_r_note = Some("zero_variance".into());
    assert!(engagement_chart(&b).is_none());

    let gdelt = load_bundle(tmp.path(), "cars_fuel__gdelt.json");
    assert!(gdelt.engagement.is_none());
    assert!(engagement_chart(&gdelt).is_none());
    let index = std::fs::read_to_string(tmp.path().join("report/index.csv")).unwrap();
    assert!(index.contains(",engagement,cars_fuel,gdelt,omitted: "));
}

#[test]
fn chart_csv_twins_carry_the_plotted_data() {
    let tmp = tempfile::tempdir().unwrap();
    run_all(&corpus_config(tmp.path())).unwrap();
    let b = load_bundle(tmp.path(), "mobility_cycle_lane__instagram.json");
    let ts = timeseries_chart(&b);
    let rows: Vec<&str> = ts.csv.lines().collect();
    assert_eq!(rows[0], "week_start,supply,demand");
    assert_eq!(rows.len(), b.weeks + 1);
    assert_eq!(
        rows[1],
        format!(
            "{},{},{}",
            b.first_week, b.supply.normalized[0], b.demand.normalized[0]
        )
    );
    let dc = delta_chart(&b);
    let states: Vec<&str> = dc
        .csv
        .lines()
        .skip(1)
        .map(|l| l.rsplit(',').next().unwrap())
        .collect();
    let over = states.iter().filter(|s| **s == "overabundance").count();
    let episodes_weeks: usize = b
        .episodes
        .iter()
        .filter(|e| e.kind == infodelta::EpisodeKind::Overabundance)
        .map(|e| e.weeks)
        .sum();
    assert_eq!(over, episodes_weeks);
    assert_eq!(timeseries_chart(&b), ts);
}

#[test]
fn two_runs_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    run_all(&corpus_config(a.path())).unwrap();
    run_all(&corpus_config(b.path())).unwrap();
    let ta = read_tree(a.path());
    let tb = read_tree(b.path());
    assert_eq!(ta.len(), tb.len());
    for ((na, ba), (nb, bb)) in ta.iter().zip(&tb) {
        assert_eq!(na, nb);
        assert!(ba == bb, "{na} differs between runs");
    }
}

#[test]
fn sequential_and_parallel_analysis_agree() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let ca = corpus_config(a.path());
    let cb = corpus_config(b.path());
    cmd_ingest(&ca).unwrap();
    cmd_ingest(&cb).unwrap();
    cmd_analyze_with(&ca, Execution::Parallel).unwrap();
    cmd_analyze_with(&cb, Execution::Sequential).unwrap();
    assert_eq!(
        read_tree(&a.path().join("analysis")),
        read_tree(&b.path().join("analysis"))
    );
}

#[test]
fn rerun_replaces_stale_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let config = corpus_config(tmp.path());
    run_all(&config).unwrap();
    let stale = tmp.path().join("report/stale.svg");
    std::fs::write(&stale, "x").unwrap();
    cmd_report(&config).unwrap();
    assert!(!stale.exists());
}

#[test]
fn stages_need_their_inputs() {
    let tmp = tempfile::tempdir().unwrap();
    let config = corpus_config(tmp.path());
    assert!(matches!(
        infodelta::pipeline::cmd_analyze(&config),
        Err(PipelineError::NothingToAnalyze(_))
    ));
    assert!(matches!(
        cmd_report(&config),
        Err(PipelineError::NothingToReport(_))
    ));
}

mod common;

use common::{date, fixtures_dir};
use infodelta::ingest::gdelt::{fetch_gdelt_timeline, parse_timeline, Transport};
use infodelta::ingest::posts::read_posts;
use infodelta::ingest::trends::{parse_trends, read_trends_csv};
use infodelta::{BooleanQuery, IngestError, Source, Window};

#[test]
fn posts_file_scan_oracle() {
    let path = fixtures_dir().join("posts_1000.csv");
    let text = std::fs::read_to_string(&path).unwrap();
    // The fixture has no quoted fields, so a plain split is a valid oracle.
    let rows: Vec<&str> = text.lines().skip(1).filter(|l| !l.is_empty()).collect();
    let engagement: u64 = rows
        .iter()
        .map(|l| l.split(',').nth(4).unwrap().parse::<u64>().unwrap())
        .sum();
    let followers: u64 = rows
        .iter()
        .map(|l| l.split(',').nth(3).unwrap().parse::<u64>().unwrap())
        .sum();

    let window = Window::new(date("2023-01-02"), date("2023-03-20")).unwrap();
    let read = read_posts(&path, &window).unwrap();
    assert_eq!(rows.len(), 1000);
    assert_eq!(read.records.len(), 1000);
    assert_eq!(read.skips.out_of_window, 0);
    assert!(read.skips.row_errors.is_empty());
    assert_eq!(
        read.records.iter().map(|r| r.total_engagement).sum::<u64>(),
        engagement
    );
    assert_eq!(
        read.records
            .iter()
            .map(|r| r.followers_at_post)
            .sum::<u64>(),
        followers
    );
}

#[test]
fn posts_outside_window_are_counted_not_kept() {
    let path = fixtures_dir().join("posts_1000.csv");
    let text = std::fs::read_to_string(&path).unwrap();
    let window = Window::new(date("2023-01-02"), date("2023-01-30")).unwrap();
    let last = date("2023-02-05");
    let inside = text
        .lines()
        .skip(1)
        .filter(|l| {
            let day = &l.split(',').nth(1).unwrap()[..10];
            let d = date(day);
            d >= date("2023-01-02") && d <= last
        })
        .count();
    let read = read_posts(&path, &window).unwrap();
    assert_eq!(read.records.len(), inside);
    assert_eq!(read.skips.out_of_window, 1000 - inside);
}

#[test]
fn trends_86_week_export() {
    let path = fixtures_dir().join("trends_86_weeks.csv");
    let expected: Vec<u64> =
        std::fs::read_to_string(fixtures_dir().join("trends_86_weeks.expected"))
            .unwrap()
            .trim()
            .split(',')
            .map(|v| v.parse().unwrap())
            .collect();
    let s = read_trends_csv(&path).unwrap();
    assert_eq!(s.subtopic_id, "trends_86_weeks");
    assert_eq!(s.source, Source::Trends);
    assert_eq!(s.first_week, date("2022-12-26"));
    assert_eq!(s.values.len(), 86);
    assert_eq!(s.values, expected);
    assert_eq!(s.week_starts().last().copied(), Some(date("2024-08-12")));
}

#[test]
fn trends_italian_header_with_sunday_dates() {
    let s = read_trends_csv(&fixtures_dir().join("trends_settimana_sunday.csv")).unwrap();
    assert_eq!(s.first_week, date("2022-12-26"));
    assert_eq!(s.values, vec![0, 37, 100, 0]);
}

#[test]
fn trends_quoted_label() {
    let s = read_trends_csv(&fixtures_dir().join("trends_week_quoted.csv")).unwrap();
    assert_eq!(s.first_week, date("2023-01-02"));
    assert_eq!(s.values, vec![12, 0, 100]);
}

#[test]
fn trends_errors() {
    assert!(matches!(
        read_trends_csv(&fixtures_dir().join("trends_gap.csv")),
        Err(IngestError::FormatError { line: 5, .. })
    ));
    assert!(matches!(
        read_trends_csv(&fixtures_dir().join("trends_out_of_range.csv")),
        Err(IngestError::RangeError {
            line: 5,
            value: 101
        })
    ));
    assert!(matches!(parse_trends("", "x"), Err(IngestError::EmptyFile)));
    assert!(matches!(
        parse_trends("Week,x\n", "x"),
        Err(IngestError::EmptyFile)
    ));
    assert!(matches!(
        parse_trends("2023-01-02,5\n", "x"),
        Err(IngestError::FormatError { .. })
    ));
    assert!(matches!(
        parse_trends("Week,x\n2023-01-02,abc\n", "x"),
        Err(IngestError::FormatError { line: 2, .. })
    ));
}

fn query() -> BooleanQuery {
    BooleanQuery::parse(r#""pista ciclabile" OR bici"#).unwrap()
}

#[test]
fn gdelt_fixture_weekly_sums() {
    let window = Window::new(date("2023-01-02"), date("2023-01-09")).unwrap();
    let file = fixtures_dir().join("gdelt_two_weeks.json");
    let s =
        fetch_gdelt_timeline(&query(), "IT", &window, &Transport::Fixture(&file), "cycle").unwrap();
    assert_eq!(s.values, vec![5, 5]);
    assert_eq!(s.source, Source::Gdelt);
    assert_eq!(s.first_week, date("2023-01-02"));

    // Days outside the window are dropped.
    let narrow = Window::new(date("2023-01-09"), date("2023-01-09")).unwrap();
    let s =
        fetch_gdelt_timeline(&query(), "IT", &narrow, &Transport::Fixture(&file), "cycle").unwrap();
    assert_eq!(s.values, vec![5]);
}

#[test]
fn gdelt_empty_response_is_all_zero() {
    let window = Window::new(date("2023-01-02"), date("2023-01-23")).unwrap();
    let file = fixtures_dir().join("gdelt_empty.json");
    let s =
        fetch_gdelt_timeline(&query(), "IT", &window, &Transport::Fixture(&file), "cycle").unwrap();
    assert_eq!(s.values, vec![0, 0, 0, 0]);
}

#[test]
fn gdelt_bad_bodies() {
    let window = Window::new(date("2023-01-02"), date("2023-01-09")).unwrap();
    let file = fixtures_dir().join("gdelt_not_json.json");
    assert!(matches!(
        fetch_gdelt_timeline(&query(), "IT", &window, &Transport::Fixture(&file), "x"),
        Err(IngestError::ApiFormatError(_))
    ));
    assert!(matches!(
        parse_timeline(r#"{"timeline": 3}"#),
        Err(IngestError::ApiFormatError(_))
    ));
    assert!(matches!(
        parse_timeline(r#"{"timeline":[{"data":[{"date":"bogus","value":1}]}]}"#),
        Err(IngestError::ApiFormatError(_))
    ));
    let missing = tempfile::tempdir().unwrap();
    assert!(matches!(
        fetch_gdelt_timeline(
            &query(),
            "IT",
            &window,
            &Transport::Fixture(missing.path()),
            "x"
        ),
        Err(IngestError::FixtureMissing(_))
    ));
}

#[test]
fn gdelt_fixture_replay_is_deterministic() {
    let window: Window = "2022-12-26..2024-08-12".parse().unwrap();
    let tax = infodelta::Taxonomy::default_bundled();
    let dir = common::corpus_dir().join("gdelt");
    for st in tax.subtopics() {
        let a = fetch_gdelt_timeline(
            &st.news_query,
            "IT",
            &window,
            &Transport::Fixture(&dir),
            &st.id,
        )
        .unwrap();
        let b = fetch_gdelt_timeline(
            &st.news_query,
            "IT",
            &window,
            &Transport::Fixture(&dir),
            &st.id,
        )
        .unwrap();
        assert_eq!(a, b);
        assert_eq!(a.values.len(), 86);
    }
}

mod common;

use chrono::{DateTime, Datelike, Duration, TimeZone, Utc, Weekday};
use common::{date, normalized, rescale_oracle};
use infodelta::ingest::posts::Platform;
use infodelta::series::{read_series_csv, write_series_csv};
use infodelta::{
    aggregate_weekly, align, cumulative, rescale, week_of, PostRecord, RawSeries, Source, Window,
};
use proptest::prelude::*;

fn raw(values: Vec<u64>) -> RawSeries {
    RawSeries {
        subtopic_id: "t".into(),
        source: Source::Gdelt,
        first_week: date("2023-01-02"),
        values,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn rescale_matches_exhaustive_oracle(values in prop::collection::vec(0u64..=10_000, 1..120)) {
        let n = rescale(&raw(values.clone()));
        prop_assert_eq!(&n.values, &rescale_oracle(&values));
        prop_assert_eq!(n.degenerate, values.iter().all(|&v| v == 0));
    }

    #[test]
    fn rescale_is_bounded_monotone_and_hits_100(values in prop::collection::vec(0u64..=10_000, 1..120)) {
        let n = rescale(&raw(values.clone())).values;
        prop_assert!(n.iter().all(|&v| v <= 100));
        if values.iter().any(|&v| v > 0) {
            prop_assert!(n.contains(&100));
        }
        for i in 0..values.len() {
            for j in 0..values.len() {
                if values[i] <= values[j] {
                    prop_assert!(n[i] <= n[j]);
                }
            }
        }
    }

    #[test]
    fn rescale_is_scale_invariant(values in prop::collection::vec(0u64..=10_000, 1..120), c in 1u64..1000) {
        let scaled: Vec<u64> = values.iter().map(|v| v * c).collect();
        prop_assert_eq!(rescale(&raw(values)).values, rescale(&raw(scaled)).values);
    }

    #[test]
    fn week_of_returns_the_monday_on_or_before(secs in 1_500_000_000i64..2_000_000_000) {
        let ts = Utc.timestamp_opt(secs, 0).unwrap();
        let w = week_of(ts);
        prop_assert_eq!(w.weekday(), Weekday::Mon);
        let days = (ts.date_naive() - w).num_days();
        prop_assert!((0..7).contains(&days));
        prop_assert_eq!(w.iso_week(), ts.date_naive().iso_week());
    }

    #[test]
    fn series_csv_round_trips(values in prop::collection::vec(0u64..=1_000_000, 1..60)) {
        let s = raw(values);
        let mut buf = Vec::new();
        write_series_csv(&mut buf, &s).unwrap();
        prop_assert_eq!(read_series_csv(&buf[..]).unwrap(), s);
    }

    #[test]
    fn cumulative_is_plain_sum(values in prop::collection::vec(0u8..=100, 0..120)) {
        let expect: u64 = values.iter().map(|&v| v as u64).sum();
        prop_assert_eq!(cumulative(&normalized(Source::Trends, values)), expect);
    }
}

#[test]
fn week_of_edges() {
    let at = |s: &str| DateTime::parse_from_rfc3339(s).unwrap().with_timezone(&Utc);
    assert_eq!(week_of(at("2023-01-01T23:59:59Z")), date("2022-12-26"));
    assert_eq!(week_of(at("2023-01-02T00:00:00Z")), date("2023-01-02"));
    assert_eq!(week_of(at("2024-02-29T12:00:00Z")), date("2024-02-26"));
    // Timezone offsets are resolved to UTC first.
    assert_eq!(week_of(at("2023-01-02T00:30:00+01:00")), date("2022-12-26"));
}

fn post(
    platform: Platform,
    at: DateTime<Utc>,
    sub: Option<&str>,
    eng: u64,
    followers: u64,
) -> PostRecord {
    PostRecord {
        platform,
        posted_at: at,
        account_id: "a".into(),
        followers_at_post: followers,
        total_engagement: eng,
        text: String::new(),
        subtopic_id: sub.map(str::to_string),
    }
}

fn posts_strategy() -> impl Strategy<Value = Vec<PostRecord>> {
    let one = (
        prop::sample::select(vec![
            Platform::Facebook,
            Platform::Instagram,
            Platform::Other,
        ]),
        -20 * 86_400i64..120 * 86_400,
        prop::sample::select(vec![Some("a"), Some("b"), None]),
        0u64..10_000,
        0u64..100_000,
    )
        .prop_map(|(p, off, sub, e, f)| {
            let origin = Utc.with_ymd_and_hms(2023, 1, 2, 0, 0, 0).unwrap();
            post(p, origin + Duration::seconds(off), sub, e, f)
        });
    prop::collection::vec(one, 0..300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn aggregate_matches_interval_scan(posts in posts_strategy()) {
        let window = Window::new(date("2023-01-02"), date("2023-03-27")).unwrap();
        let mut total = 0u64;
        for sub in ["a", "b"] {
            for source in [Source::Facebook, Source::Instagram] {
                let (counts, eng) = aggregate_weekly(&posts, sub, source, &window).unwrap();
                prop_assert_eq!(counts.values.len(), 13);
                for w in 0..13 {
                    let start = Utc.from_utc_datetime(&date("2023-01-02").and_hms_opt(0, 0, 0).unwrap()) + Duration::weeks(w as i64);
                    let end = start + Duration::weeks(1);
                    let hits: Vec<&PostRecord> = posts
                        .iter()
                        .filter(|p| p.platform == source.platform().unwrap()
                            && p.subtopic_id.as_deref() == Some(sub)
                            && p.posted_at >= start && p.posted_at < end)
                        .collect();
                    prop_assert_eq!(counts.values[w], hits.len() as u64);
                    prop_assert_eq!(eng.engagement_sum[w], hits.iter().map(|p| p.total_engagement).sum::<u64>());
                    prop_assert_eq!(eng.followers_sum[w], hits.iter().map(|p| p.followers_at_post).sum::<u64>());
                }
                total += counts.total();
            }
        }
        let last = Utc.from_utc_datetime(&date("2023-04-03").and_hms_opt(0, 0, 0).unwrap());
        let first = Utc.from_utc_datetime(&date("2023-01-02").and_hms_opt(0, 0, 0).unwrap());
        let expect = posts
            .iter()
            .filter(|p| p.platform != Platform::Other && p.subtopic_id.is_some() && p.posted_at >= first && p.posted_at < last)
            .count() as u64;
        prop_assert_eq!(total, expect);
    }
}

#[test]
fn aggregate_rejects_demand_source() {
    let window = Window::new(date("2023-01-02"), date("2023-01-09")).unwrap();
    assert!(aggregate_weekly(&[], "a", Source::Trends, &window).is_err());
}

#[test]
fn align_trims_to_overlap() {
    let mut a = normalized(Source::Facebook, vec![1, 2, 3, 4]);
    let mut b = normalized(Source::Trends, vec![10, 20, 30, 40]);
    a.first_week = date("2023-01-02");
    b.first_week = date("2023-01-16");
    let al = align(&a, &b).unwrap();
    assert_eq!(al.first_week, date("2023-01-16"));
    assert_eq!(al.a, vec![3, 4]);
    assert_eq!(al.b, vec![10, 20]);

    b.first_week = date("2023-02-27");
    assert!(align(&a, &b).is_err());
}

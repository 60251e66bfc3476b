//! Weekly series: ISO-week bucketing, aggregation of posts into supply
//! counts, 0–100 rescaling, alignment and cumulative totals.
//!
//! Every series starts on a Monday and covers consecutive weeks with no
//! gaps, so it is stored as a first week plus a value vector.

use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use chrono::{DateTime, Datelike, Days, NaiveDate, Utc, Weekday};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::posts::{Platform, PostRecord};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SeriesError {
    #[error("invalid window: {0}")]
    WindowError(String),
    #[error("series do not overlap")]
    NoOverlap,
    #[error("series weeks differ: {0}")]
    AlignmentError(String),
    #[error("series format error at line {line}: {message}")]
    Format { line: usize, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Facebook,
    Instagram,
    Gdelt,
    Trends,
}

impl Source {
    pub const SUPPLY: [Source; 3] = [Source::Facebook, Source::Instagram, Source::Gdelt];

    pub fn as_str(self) -> &'static str {
        match self {
            Source::Facebook => "facebook",
            Source::Instagram => "instagram",
            Source::Gdelt => "gdelt",
            Source::Trends => "trends",
        }
    }

    pub fn from_platform(platform: Platform) -> Option<Source> {
        match platform {
            Platform::Facebook => Some(Source::Facebook),
            Platform::Instagram => Some(Source::Instagram),
            Platform::Other => None,
        }
    }

    pub fn platform(self) -> Option<Platform> {
        match self {
            Source::Facebook => Some(Platform::Facebook),
            Source::Instagram => Some(Platform::Instagram),
            _ => None,
        }
    }
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Source {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "facebook" => Ok(Source::Facebook),
            "instagram" => Ok(Source::Instagram),
            "gdelt" => Ok(Source::Gdelt),
            "trends" => Ok(Source::Trends),
            other => Err(format!("unknown source '{other}'")),
        }
    }
}

/// Monday of the ISO week containing `ts`.
pub fn week_of(ts: DateTime<Utc>) -> NaiveDate {
    monday_of(ts.date_naive())
}

pub fn monday_of(date: NaiveDate) -> NaiveDate {
    let back = date.weekday().num_days_from_monday() as u64;
    date - Days::new(back)
}

pub fn add_weeks(monday: NaiveDate, weeks: usize) -> NaiveDate {
    monday + Days::new(7 * weeks as u64)
}

/// Inclusive range of weeks, both ends Mondays.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub start: NaiveDate,
    pub end: NaiveDate,
}

impl Window {
    pub fn new(start: NaiveDate, end: NaiveDate) -> Result<Self, SeriesError> {
        if start.weekday() != Weekday::Mon {
            return Err(SeriesError::WindowError(format!(
                "start {start} is not a Monday"
            )));
        }
        if end.weekday() != Weekday::Mon {
            return Err(SeriesError::WindowError(format!(
                "end {end} is not a Monday"
            )));
        }
        if start > end {
            return Err(SeriesError::WindowError(format!(
                "start {start} is after end {end}"
            )));
        }
        Ok(Window { start, end })
    }

    pub fn weeks(&self) -> usize {
        ((self.end - self.start).num_days() / 7) as usize + 1
    }

    pub fn week_starts(&self) -> impl Iterator<Item = NaiveDate> + '_ {
        (0..self.weeks()).map(move |i| add_weeks(self.start, i))
    }

    /// Week index of a Monday inside the window.
    pub fn index_of(&self, monday: NaiveDate) -> Option<usize> {
        if monday < self.start || monday > self.end {
            return None;
        }
        Some(((monday - self.start).num_days() / 7) as usize)
    }

    pub fn contains(&self, ts: DateTime<Utc>) -> bool {
        self.index_of(week_of(ts)).is_some()
    }

    /// Last day covered by the window (the Sunday after `end`).
    pub fn last_day(&self) -> NaiveDate {
        self.end + Days::new(6)
    }
}

impl FromStr for Window {
    type Err = SeriesError;

    /// Parses `YYYY-MM-DD..YYYY-MM-DD`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (a, b) = s
            .split_once("..")
            .ok_or_else(|| SeriesError::WindowError(format!("expected START..END, got '{s}'")))?;
        let parse = |t: &str| {
            NaiveDate::parse_from_str(t.trim(), "%Y-%m-%d")
                .map_err(|e| SeriesError::WindowError(format!("bad date '{t}': {e}")))
        };
        Window::new(parse(a)?, parse(b)?)
    }
}

/// Raw weekly volumes for one subtopic and source.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawSeries {
    pub subtopic_id: String,
    pub source: Source,
    pub first_week: NaiveDate,
    pub values: Vec<u64>,
}

impl RawSeries {
    pub fn week_starts(&self) -> Vec<NaiveDate> {
        (0..self.values.len())
            .map(|i| add_weeks(self.first_week, i))
            .collect()
    }

    pub fn total(&self) -> u64 {
        self.values.iter().sum()
    }
}

/// Series on the 0–100 scale.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalizedSeries {
    pub subtopic_id: String,
    pub source: Source,
    pub first_week: NaiveDate,
    pub values: Vec<u8>,
    /// Set when the raw series was all zero.
    pub degenerate: bool,
}

impl NormalizedSeries {
    pub fn week_starts(&self) -> Vec<NaiveDate> {
        (0..self.values.len())
            .map(|i| add_weeks(self.first_week, i))
            .collect()
    }

    /// Treats an already 0–100 series (search interest) as normalized.
    pub fn from_percent(raw: &RawSeries) -> Result<Self, SeriesError> {
        let mut values = Vec::with_capacity(raw.values.len());
        for (i, &v) in raw.values.iter().enumerate() {
            if v > 100 {
                return Err(SeriesError::Format {
                    line: i + 1,
                    message: format!("value {v} outside 0..=100"),
                });
            }
            values.push(v as u8);
        }
        Ok(NormalizedSeries {
            subtopic_id: raw.subtopic_id.clone(),
            source: raw.source,
            first_week: raw.first_week,
            degenerate: values.iter().all(|&v| v == 0),
            values,
        })
    }
}

/// Weekly engagement and post counts for one subtopic and platform.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EngagementSeries {
    pub subtopic_id: String,
    pub source: Source,
    pub first_week: NaiveDate,
    pub engagement_sum: Vec<u64>,
    pub post_count: Vec<u64>,
    /// Sum of author follower counts at posting time.
    pub followers_sum: Vec<u64>,
}

impl EngagementSeries {
    pub fn len(&self) -> usize {
        self.engagement_sum.len()
    }

    pub fn is_empty(&self) -> bool {
        self.engagement_sum.is_empty()
    }
}

/// Buckets the posts of one subtopic and platform into the window's weeks.
///
/// Posts for other subtopics, other platforms, or outside the window are
/// ignored.
pub fn aggregate_weekly(
    posts: &[PostRecord],
    subtopic_id: &str,
    source: Source,
    window: &Window,
) -> Result<(RawSeries, EngagementSeries), SeriesError> {
    let window = Window::new(window.start, window.end)?;
    let platform = source.platform().ok_or_else(|| {
        SeriesError::WindowError(format!("source {source} is not a post platform"))
    })?;
    let n = window.weeks();
    let mut counts = vec![0u64; n];
    let mut engagement = vec![0u64; n];
    let mut followers = vec![0u64; n];
    for post in posts {
        if post.platform != platform || post.subtopic_id.as_deref() != Some(subtopic_id) {
            continue;
        }
        if let Some(i) = window.index_of(week_of(post.posted_at)) {
            counts[i] += 1;
            engagement[i] += post.total_engagement;
            followers[i] += post.followers_at_post;
        }
    }
    let raw = RawSeries {
        subtopic_id: subtopic_id.to_string(),
        source,
        first_week: window.start,
        values: counts.clone(),
    };
    let eng = EngagementSeries {
        subtopic_id: subtopic_id.to_string(),
        source,
        first_week: window.start,
        engagement_sum: engagement,
        post_count: counts,
        followers_sum: followers,
    };
    Ok((raw, eng))
}

/// Round-half-up percentage of the series maximum: `floor(100·s/max + 0.5)`.
///
/// An all-zero series maps to all zeros with `degenerate` set.
pub fn rescale(series: &RawSeries) -> NormalizedSeries {
    let max = series.values.iter().copied().max().unwrap_or(0);
    let values = if max == 0 {
        vec![0; series.values.len()]
    } else {
        let max = max as u128;
        series
            .values
            .iter()
            .map(|&s| ((200 * s as u128 + max) / (2 * max)) as u8)
            .collect()
    };
    NormalizedSeries {
        subtopic_id: series.subtopic_id.clone(),
        source: series.source,
        first_week: series.first_week,
        values,
        degenerate: max == 0,
    }
}

/// Overlap of two week ranges: (offset into a, offset into b, length, first week).
pub fn overlap(
    first_a: NaiveDate,
    len_a: usize,
    first_b: NaiveDate,
    len_b: usize,
) -> Option<(usize, usize, usize, NaiveDate)> {
    if len_a == 0 || len_b == 0 {
        return None;
    }
    let end_a = add_weeks(first_a, len_a - 1);
    let end_b = add_weeks(first_b, len_b - 1);
    let start = first_a.max(first_b);
    let end = end_a.min(end_b);
    if start > end {
        return None;
    }
    let off_a = ((start - first_a).num_days() / 7) as usize;
    let off_b = ((start - first_b).num_days() / 7) as usize;
    let len = ((end - start).num_days() / 7) as usize + 1;
    Some((off_a, off_b, len, start))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Aligned {
    pub first_week: NaiveDate,
    pub a: Vec<u8>,
    pub b: Vec<u8>,
}

/// Restricts two normalized series to their common weeks.
pub fn align(a: &NormalizedSeries, b: &NormalizedSeries) -> Result<Aligned, SeriesError> {
    let (oa, ob, len, first_week) =
        overlap(a.first_week, a.values.len(), b.first_week, b.values.len())
            .ok_or(SeriesError::NoOverlap)?;
    Ok(Aligned {
        first_week,
        a: a.values[oa..oa + len].to_vec(),
        b: b.values[ob..ob + len].to_vec(),
    })
}

pub fn cumulative(series: &NormalizedSeries) -> u64 {
    series.values.iter().map(|&v| v as u64).sum()
}

/// Writes `subtopic_id,source,week_start,value` rows.
pub fn write_series_csv<W: Write>(out: W, series: &RawSeries) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["subtopic_id", "source", "week_start", "value"])?;
    for (week, value) in series.week_starts().iter().zip(&series.values) {
        w.write_record([
            series.subtopic_id.as_str(),
            series.source.as_str(),
            &week.to_string(),
            &value.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_normalized_csv<W: Write>(out: W, series: &NormalizedSeries) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["subtopic_id", "source", "week_start", "value"])?;
    for (week, value) in series.week_starts().iter().zip(&series.values) {
        w.write_record([
            series.subtopic_id.as_str(),
            series.source.as_str(),
            &week.to_string(),
            &value.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_engagement_csv<W: Write>(out: W, series: &EngagementSeries) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "subtopic_id",
        "source",
        "week_start",
        "engagement_sum",
        "post_count",
        "followers_sum",
    ])?;
    for i in 0..series.len() {
        w.write_record([
            series.subtopic_id.as_str(),
            series.source.as_str(),
            &add_weeks(series.first_week, i).to_string(),
            &series.engagement_sum[i].to_string(),
            &series.post_count[i].to_string(),
            &series.followers_sum[i].to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn format_err(line: usize, message: impl Into<String>) -> SeriesError {
    SeriesError::Format {
        line,
        message: message.into(),
    }
}

type Rows = (String, Source, NaiveDate, Vec<Vec<u64>>);

/// Reads rows of `(subtopic_id, source, week_start, numbers...)`, checking
/// that weeks are consecutive Mondays and that ids and sources are uniform.
fn read_rows<R: Read>(input: R, header: &[&str]) -> Result<Rows, SeriesError> {
    let mut reader = csv::Reader::from_reader(input);
    let got = reader
        .headers()
        .map_err(|e| format_err(1, e.to_string()))?
        .clone();
    if got.iter().collect::<Vec<_>>() != header {
        return Err(format_err(
            1,
            format!("expected header {}", header.join(",")),
        ));
    }
    let mut id: Option<String> = None;
    let mut source: Option<Source> = None;
    let mut first: Option<NaiveDate> = None;
    let mut columns: Vec<Vec<u64>> = vec![Vec::new(); header.len() - 3];
    for (i, rec) in reader.records().enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| format_err(line, e.to_string()))?;
        let rid = rec.get(0).unwrap_or_default();
        let rsrc: Source = rec
            .get(1)
            .unwrap_or_default()
            .parse()
            .map_err(|e: String| format_err(line, e))?;
        let week = NaiveDate::parse_from_str(rec.get(2).unwrap_or_default(), "%Y-%m-%d")
            .map_err(|e| format_err(line, e.to_string()))?;
        match (&id, source, first) {
            (None, _, _) => {
                if week.weekday() != Weekday::Mon {
                    return Err(format_err(line, format!("{week} is not a Monday")));
                }
                id = Some(rid.to_string());
                source = Some(rsrc);
                first = Some(week);
            }
            (Some(prev), Some(psrc), Some(f)) => {
                if prev != rid || psrc != rsrc {
                    return Err(format_err(line, "mixed subtopic/source in one file"));
                }
                let expected = add_weeks(f, columns[0].len());
                if week != expected {
                    return Err(format_err(
                        line,
                        format!("expected week {expected}, got {week}"),
                    ));
                }
            }
            _ => unreachable!(),
        }
        for (c, col) in columns.iter_mut().enumerate() {
            let v = rec
                .get(3 + c)
                .unwrap_or_default()
                .parse::<u64>()
                .map_err(|e| format_err(line, e.to_string()))?;
            col.push(v);
        }
    }
    match (id, source, first) {
        (Some(id), Some(source), Some(first)) => Ok((id, source, first, columns)),
        _ => Err(format_err(1, "no data rows")),
    }
}

pub fn read_series_csv<R: Read>(input: R) -> Result<RawSeries, SeriesError> {
    let (subtopic_id, source, first_week, mut cols) =
        read_rows(input, &["subtopic_id", "source", "week_start", "value"])?;
    Ok(RawSeries {
        subtopic_id,
        source,
        first_week,
        values: cols.remove(0),
    })
}

pub fn read_engagement_csv<R: Read>(input: R) -> Result<EngagementSeries, SeriesError> {
    let (subtopic_id, source, first_week, mut cols) = read_rows(
        input,
        &[
            "subtopic_id",
            "source",
            "week_start",
            "engagement_sum",
            "post_count",
            "followers_sum",
        ],
    )?;
    let followers_sum = cols.pop().expect("3 columns");
    let post_count = cols.pop().expect("3 columns");
    let engagement_sum = cols.pop().expect("3 columns");
    Ok(EngagementSeries {
        subtopic_id,
        source,
        first_week,
        engagement_sum,
        post_count,
        followers_sum,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::TimeZone;

    fn d(s: &str) -> NaiveDate {
        NaiveDate::parse_from_str(s, "%Y-%m-%d").unwrap()
    }

    fn ts(s: &str) -> DateTime<Utc> {
        DateTime::parse_from_rfc3339(s).unwrap().with_timezone(&Utc)
    }

    fn raw(values: &[u64]) -> RawSeries {
        RawSeries {
            subtopic_id: "s".into(),
            source: Source::Facebook,
            first_week: d("2022-12-26"),
            values: values.to_vec(),
        }
    }

    fn post(at: &str, engagement: u64) -> PostRecord {
        PostRecord {
            platform: Platform::Facebook,
            posted_at: ts(at),
            account_id: "a".into(),
            followers_at_post: 100,
            total_engagement: engagement,
            text: String::new(),
            subtopic_id: Some("s".into()),
        }
    }

    #[test]
    fn week_of_examples() {
        assert_eq!(week_of(ts("2022-12-26T09:00:00Z")), d("2022-12-26"));
        assert_eq!(week_of(ts("2023-01-01T23:59:59Z")), d("2022-12-26"));
        assert_eq!(week_of(ts("2024-08-14T00:00:00Z")), d("2024-08-12"));
        let monday = Utc.with_ymd_and_hms(2024, 8, 12, 0, 0, 0).unwrap();
        assert_eq!(week_of(monday), d("2024-08-12"));
    }

    #[test]
    fn default_window_has_86_weeks() {
        let w: Window = "2022-12-26..2024-08-12".parse().unwrap();
        assert_eq!(w.weeks(), 86);
        assert_eq!(w.last_day(), d("2024-08-18"));
    }

    #[test]
    fn window_validation() {
        assert!(Window::new(d("2022-12-27"), d("2023-01-02")).is_err());
        assert!(Window::new(d("2023-01-02"), d("2022-12-26")).is_err());
        assert!("2022-12-26".parse::<Window>().is_err());
    }

    #[test]
    fn aggregate_examples() {
        let w = Window::new(d("2022-12-26"), d("2022-12-26")).unwrap();
        let posts = vec![
            post("2022-12-26T10:00:00Z", 10),
            post("2022-12-28T10:00:00Z", 32),
        ];
        let (r, e) = aggregate_weekly(&posts, "s", Source::Facebook, &w).unwrap();
        assert_eq!(r.values, vec![2]);
        assert_eq!(e.engagement_sum, vec![42]);
        assert_eq!(e.followers_sum, vec![200]);

        let w4 = Window::new(d("2022-12-26"), d("2023-01-16")).unwrap();
        let (r, _) = aggregate_weekly(&[], "s", Source::Facebook, &w4).unwrap();
        assert_eq!(r.values, vec![0, 0, 0, 0]);

        let bad = Window {
            start: d("2023-01-16"),
            end: d("2022-12-26"),
        };
        assert!(matches!(
            aggregate_weekly(&[], "s", Source::Facebook, &bad),
            Err(SeriesError::WindowError(_))
        ));
    }

    #[test]
    fn rescale_examples() {
        assert_eq!(rescale(&raw(&[4, 8, 2])).values, vec![50, 100, 25]);
        let z = rescale(&raw(&[0, 0, 0]));
        assert_eq!(z.values, vec![0, 0, 0]);
        assert!(z.degenerate);
        assert_eq!(rescale(&raw(&[7, 7, 7])).values, vec![100, 100, 100]);
        // 1/8 = 12.5 rounds half up
        assert_eq!(rescale(&raw(&[1, 8])).values, vec![13, 100]);
        assert_eq!(rescale(&raw(&[1, 200])).values, vec![1, 100]);
        assert_eq!(rescale(&raw(&[1, 201])).values, vec![0, 100]);
    }

    #[test]
    fn align_examples() {
        let mk = |first: &str, n: usize| NormalizedSeries {
            subtopic_id: "s".into(),
            source: Source::Trends,
            first_week: d(first),
            values: (0..n as u8).collect(),
            degenerate: false,
        };
        let a = mk("2023-01-02", 12);
        let same = align(&a, &a).unwrap();
        assert_eq!(same.a, a.values);
        assert_eq!(same.b, a.values);

        let b = mk("2023-01-16", 12);
        let al = align(&a, &b).unwrap();
        assert_eq!(al.a.len(), 10);
        assert_eq!(al.b.len(), 10);
        assert_eq!(al.first_week, d("2023-01-16"));
        assert_eq!(al.a[0], 2);
        assert_eq!(al.b[0], 0);

        let c = mk("2024-01-01", 3);
        assert_eq!(align(&a, &c), Err(SeriesError::NoOverlap));
    }

    #[test]
    fn cumulative_examples() {
        let n = |v: &[u8]| NormalizedSeries {
            subtopic_id: "s".into(),
            source: Source::Trends,
            first_week: d("2023-01-02"),
            values: v.to_vec(),
            degenerate: false,
        };
        assert_eq!(cumulative(&n(&[1, 2, 3])), 6);
        assert_eq!(cumulative(&n(&[0, 0])), 0);
    }

    #[test]
    fn csv_round_trip_and_gap_detection() {
        let s = raw(&[3, 0, 7]);
        let mut buf = Vec::new();
        write_series_csv(&mut buf, &s).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("subtopic_id,source,week_start,value\ns,facebook,2022-12-26,3\n"));
        assert_eq!(read_series_csv(buf.as_slice()).unwrap(), s);

        let gap = "subtopic_id,source,week_start,value\ns,facebook,2022-12-26,1\ns,facebook,2023-01-09,1\n";
        assert!(matches!(
            read_series_csv(gap.as_bytes()),
            Err(SeriesError::Format { line: 3, .. })
        ));
    }
}

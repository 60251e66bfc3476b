//! Search-interest CSV exports.
//!
//! Layout: a category line, a blank line, a `Week,<label>` header (or the
//! Italian `Settimana,<label>`), then `YYYY-MM-DD,value` rows where value is
//! an integer in 0..=100 or `<1`. Dates are re-anchored to the Monday of
//! their ISO week.

use std::path::Path;

use chrono::NaiveDate;

use super::IngestError;
use crate::series::{add_weeks, monday_of, RawSeries, Source};

const HEADER_KEYS: [&str; 2] = ["week", "settimana"];

pub fn read_trends_csv(path: &Path) -> Result<RawSeries, IngestError> {
    let text = std::fs::read_to_string(path).map_err(|e| IngestError::io(path, e))?;
    let id = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    parse_trends(&text, &id)
}

fn format_error(line: usize, message: impl Into<String>) -> IngestError {
    IngestError::FormatError {
        line,
        message: message.into(),
    }
}

fn unquote(s: &str) -> &str {
    let s = s.trim();
    s.strip_prefix('"')
        .and_then(|t| t.strip_suffix('"'))
        .unwrap_or(s)
}

fn is_header(line: &str) -> bool {
    let first = line
        .trim_start_matches('\u{feff}')
        .split(',')
        .next()
        .map(unquote)
        .unwrap_or_default()
        .to_lowercase();
    HEADER_KEYS.contains(&first.as_str())
}

pub fn parse_trends(text: &str, subtopic_id: &str) -> Result<RawSeries, IngestError> {
    if text.trim().is_empty() {
        return Err(IngestError::EmptyFile);
    }
    let lines: Vec<&str> = text.lines().collect();
    let header = lines
        .iter()
        .position(|l| is_header(l))
        .ok_or_else(|| format_error(1, "no 'Week,<label>' header row"))?;

    let mut first: Option<NaiveDate> = None;
    let mut values = Vec::new();
    for (i, raw) in lines.iter().enumerate().skip(header + 1) {
        let line = i + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let (date, value) = raw
            .split_once(',')
            .ok_or_else(|| format_error(line, format!("expected DATE,VALUE, got '{raw}'")))?;
        let date = NaiveDate::parse_from_str(unquote(date), "%Y-%m-%d")
            .map_err(|e| format_error(line, format!("bad date '{date}': {e}")))?;
        let value = unquote(value);
        let value = if value == "<1" {
            0
        } else {
            let v: i64 = value
                .parse()
                .map_err(|_| format_error(line, format!("bad value '{value}'")))?;
            if !(0..=100).contains(&v) {
                return Err(IngestError::RangeError { line, value: v });
            }
            v as u64
        };
        let week = monday_of(date);
        match first {
            None => first = Some(week),
            Some(f) => {
                let expected = add_weeks(f, values.len());
                if week != expected {
                    return Err(format_error(
                        line,
                        format!("expected week of {expected}, got {date}"),
                    ));
                }
            }
        }
        values.push(value);
    }
    let first_week = first.ok_or(IngestError::EmptyFile)?;
    Ok(RawSeries {
        subtopic_id: subtopic_id.to_string(),
        source: Source::Trends,
        first_week,
        values,
    })
}

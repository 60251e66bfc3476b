//! News-volume timelines from the GDELT DOC 2.0 API (`timelinevolraw` mode).
//!
//! Responses are either fetched live or replayed from recorded fixtures.
//! Fixture files hold the verbatim response body and are named after the
//! SHA-256 of the request URL, so a fixture directory can serve any number
//! of queries.

use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use chrono::NaiveDate;
use serde_json::Value;
use sha2::{Digest, Sha256};

use super::IngestError;
use crate::series::{monday_of, RawSeries, Source, Window};
use crate::taxonomy::BooleanQuery;

pub const GDELT_DOC_ENDPOINT: &str = "https://api.gdeltproject.org/api/v2/doc/doc";

/// Builds the timeline request URL for `query` restricted to one source country.
pub fn request_url(base: &str, query: &BooleanQuery, country: &str, window: &Window) -> String {
    let q = format!("{} sourcecountry:{}", query.to_gdelt(), country);
    let encoded: String = url::form_urlencoded::byte_serialize(q.as_bytes()).collect();
    format!(
        "{base}?query={encoded}&mode=timelinevolraw&format=json&startdatetime={}000000&enddatetime={}235959",
        window.start.format("%Y%m%d"),
        window.last_day().format("%Y%m%d"),
    )
}

/// File name a response to `url` is recorded under.
pub fn fixture_name(url: &str) -> String {
    format!("{}.json", hex::encode(Sha256::digest(url.as_bytes())))
}

/// Blocking HTTP client that spaces requests at least `min_interval` apart
/// and retries transient failures (HTTP 429, 5xx, transport errors) with
/// exponential backoff.
pub struct LiveClient {
    http: reqwest::blocking::Client,
    base_url: String,
    min_interval: Duration,
    max_attempts: u32,
    backoff: Duration,
    record_dir: Option<PathBuf>,
    last_request: Mutex<Option<Instant>>,
}

impl LiveClient {
    pub fn new() -> Self {
        Self::with_base_url(GDELT_DOC_ENDPOINT)
    }

    pub fn with_base_url(base_url: &str) -> Self {
        let http = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(60))
            .user_agent(concat!("infodelta/", env!("CARGO_PKG_VERSION")))
            .build()
            .expect("http client");
        LiveClient {
            http,
            base_url: base_url.to_string(),
            min_interval: Duration::from_secs(5),
            max_attempts: 3,
            backoff: Duration::from_secs(2),
            record_dir: None,
            last_request: Mutex::new(None),
        }
    }

    pub fn min_interval(mut self, interval: Duration) -> Self {
        self.min_interval = interval;
        self
    }

    /// Initial backoff; doubled after every failed attempt.
    pub fn backoff(mut self, backoff: Duration) -> Self {
        self.backoff = backoff;
        self
    }

    pub fn max_attempts(mut self, attempts: u32) -> Self {
        self.max_attempts = attempts.max(1);
        self
    }

    /// Also write every successful response body into `dir` as a fixture.
    pub fn record_to(mut self, dir: impl Into<PathBuf>) -> Self {
        self.record_dir = Some(dir.into());
        self
    }

    pub fn base_url(&self) -> &str {
        &self.base_url
    }

    pub fn get(&self, url: &str) -> Result<String, IngestError> {
        // Held for the whole exchange so requests from any thread are serialized.
        let mut last = self.last_request.lock().unwrap_or_else(|e| e.into_inner());
        let mut delay = self.backoff;
        let mut attempt = 0;
        loop {
            attempt += 1;
            if let Some(prev) = *last {
                let elapsed = prev.elapsed();
                if elapsed < self.min_interval {
                    std::thread::sleep(self.min_interval - elapsed);
                }
            }
            *last = Some(Instant::now());
            let (err, transient) = match self.http.get(url).send() {
                Ok(resp) if resp.status().is_success() => {
                    let body = resp.text().map_err(|e| IngestError::NetworkError {
                        status: None,
                        cause: e.to_string(),
                    })?;
                    self.record(url, &body)?;
                    return Ok(body);
                }
                Ok(resp) => {
                    let status = resp.status();
                    let transient = status.is_server_error() || status.as_u16() == 429;
                    (
                        IngestError::NetworkError {
                            status: Some(status.as_u16()),
                            cause: status
                                .canonical_reason()
                                .unwrap_or("HTTP error")
                                .to_string(),
                        },
                        transient,
                    )
                }
                Err(e) => (
                    IngestError::NetworkError {
                        status: None,
                        cause: e.to_string(),
                    },
                    true,
                ),
            };
            if !transient || attempt >= self.max_attempts {
                log::warn!("GDELT request failed after {attempt} attempt(s): {err}");
                return Err(err);
            }
            log::info!("GDELT attempt {attempt} failed ({err}); retrying in {delay:?}");
            std::thread::sleep(delay);
            delay *= 2;
        }
    }

    fn record(&self, url: &str, body: &str) -> Result<(), IngestError> {
        if let Some(dir) = &self.record_dir {
            std::fs::create_dir_all(dir).map_err(|e| IngestError::io(dir, e))?;
            // Named as if requested from the public endpoint so fixture replay finds it.
            let canonical = match url.strip_prefix(self.base_url.as_str()) {
                Some(rest) => format!("{GDELT_DOC_ENDPOINT}{rest}"),
                None => url.to_string(),
            };
            let path = dir.join(fixture_name(&canonical));
            std::fs::write(&path, body).map_err(|e| IngestError::io(&path, e))?;
        }
        Ok(())
    }
}

impl Default for LiveClient {
    fn default() -> Self {
        Self::new()
    }
}

/// Where timeline responses come from.
pub enum Transport<'a> {
    Live(&'a LiveClient),
    /// A recorded response body, or a directory of bodies named by [`fixture_name`].
    Fixture(&'a Path),
}

pub fn fetch_gdelt_timeline(
    query: &BooleanQuery,
    country: &str,
    window: &Window,
    transport: &Transport<'_>,
    subtopic_id: &str,
) -> Result<RawSeries, IngestError> {
    if query.phrases().is_empty() || !query.is_well_formed() {
        return Err(IngestError::EmptyQuery);
    }
    let body = match transport {
        Transport::Live(client) => {
            let url = request_url(client.base_url(), query, country, window);
            client.get(&url)?
        }
        Transport::Fixture(path) => {
            let file = if path.is_dir() {
                path.join(fixture_name(&request_url(
                    GDELT_DOC_ENDPOINT,
                    query,
                    country,
                    window,
                )))
            } else {
                path.to_path_buf()
            };
            if !file.is_file() {
                return Err(IngestError::FixtureMissing(file.display().to_string()));
            }
            std::fs::read_to_string(&file).map_err(|e| IngestError::io(&file, e))?
        }
    };
    let points = parse_timeline(&body)?;
    Ok(weekly_from_daily(&points, window, subtopic_id))
}

/// Parses `{"timeline":[{"series":..., "data":[{"date":"YYYYMMDDTHHMMSSZ","value":n}, ...]}]}`.
///
/// A bare `{}` is what the API returns when nothing matched, and is read as
/// an empty timeline.
pub fn parse_timeline(body: &str) -> Result<Vec<(NaiveDate, u64)>, IngestError> {
    let json: Value = serde_json::from_str(body).map_err(|e| {
        let excerpt: String = body.chars().take(120).collect();
        IngestError::ApiFormatError(format!("not JSON ({e}): {excerpt}"))
    })?;
    let obj = json
        .as_object()
        .ok_or_else(|| IngestError::ApiFormatError("top level is not an object".into()))?;
    if obj.is_empty() {
        return Ok(Vec::new());
    }
    let timeline = obj
        .get("timeline")
        .and_then(Value::as_array)
        .ok_or_else(|| IngestError::ApiFormatError("missing 'timeline' array".into()))?;
    let Some(series) = timeline.first() else {
        return Ok(Vec::new());
    };
    let data = series
        .get("data")
        .and_then(Value::as_array)
        .ok_or_else(|| IngestError::ApiFormatError("timeline series without 'data'".into()))?;
    data.iter()
        .map(|point| {
            let date = point
                .get("date")
                .and_then(Value::as_str)
                .ok_or_else(|| IngestError::ApiFormatError("point without 'date'".into()))?;
            let day = date
                .get(..8)
                .and_then(|d| NaiveDate::parse_from_str(d, "%Y%m%d").ok())
                .ok_or_else(|| IngestError::ApiFormatError(format!("bad date '{date}'")))?;
            let value = point
                .get("value")
                .and_then(|v| {
                    v.as_u64()
                        .or_else(|| v.as_f64().filter(|f| *f >= 0.0).map(|f| f.round() as u64))
                })
                .ok_or_else(|| IngestError::ApiFormatError(format!("bad value at {date}")))?;
            Ok((day, value))
        })
        .collect()
}

/// Sums daily counts into the window's ISO weeks; days outside are dropped.
pub fn weekly_from_daily(
    points: &[(NaiveDate, u64)],
    window: &Window,
    subtopic_id: &str,
) -> RawSeries {
    let mut values = vec![0u64; window.weeks()];
    for &(day, count) in points {
        if let Some(i) = window.index_of(monday_of(day)) {
            values[i] += count;
        }
    }
    RawSeries {
        subtopic_id: subtopic_id.to_string(),
        source: Source::Gdelt,
        first_week: window.start,
        values,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(s: &str) -> NaiveDate {
        NaiveDate::parse_from_str(s, "%Y-%m-%d").unwrap()
    }

    #[test]
    fn url_shape() {
        let q = BooleanQuery::parse(r#""casa green" OR EPBD"#).unwrap();
        let w = Window::new(d("2022-12-26"), d("2024-08-12")).unwrap();
        let url = request_url(GDELT_DOC_ENDPOINT, &q, "IT", &w);
        assert_eq!(
            url,
            "https://api.gdeltproject.org/api/v2/doc/doc?query=%28%22casa+green%22+OR+EPBD%29+sourcecountry%3AIT&mode=timelinevolraw&format=json&startdatetime=20221226000000&enddatetime=20240818235959"
        );
        assert_eq!(fixture_name(&url).len(), 64 + 5);
    }

    #[test]
    fn timeline_parsing() {
        let body = r#"{"query_details":{"title":"x"},"timeline":[{"series":"Article Count","data":[
            {"date":"20221226T000000Z","value":2,"norm":100},
            {"date":"20221227T000000Z","value":3,"norm":100}]}]}"#;
        assert_eq!(
            parse_timeline(body).unwrap(),
            vec![(d("2022-12-26"), 2), (d("2022-12-27"), 3)]
        );
        assert_eq!(parse_timeline("{}").unwrap(), vec![]);
        assert!(matches!(
            parse_timeline(r#"{"articles":[]}"#),
            Err(IngestError::ApiFormatError(_))
        ));
        assert!(matches!(
            parse_timeline("Your search contained a phrase that was too short"),
            Err(IngestError::ApiFormatError(_))
        ));
        assert!(matches!(
            parse_timeline(r#"{"timeline":[{"data":[{"date":"x","value":1}]}]}"#),
            Err(IngestError::ApiFormatError(_))
        ));
    }

    #[test]
    fn daily_to_weekly() {
        let w = Window::new(d("2022-12-26"), d("2023-01-02")).unwrap();
        let points = [
            (d("2022-12-25"), 100),
            (d("2022-12-26"), 2),
            (d("2022-12-27"), 3),
            (d("2023-01-02"), 5),
            (d("2023-01-09"), 100),
        ];
        assert_eq!(weekly_from_daily(&points, &w, "s").values, vec![5, 5]);
    }
}

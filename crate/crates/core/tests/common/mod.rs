#![allow(dead_code)]

use std::io::{BufRead, BufReader, Write};
use std::net::TcpListener;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};
use std::time::Instant;

use chrono::NaiveDate;
use infodelta::analysis::{EpisodeKind, Run};
use infodelta::{NormalizedSeries, Source};

pub fn date(s: &str) -> NaiveDate {
    NaiveDate::parse_from_str(s, "%Y-%m-%d").unwrap()
}

pub fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

pub fn fixtures_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

pub fn normalized(source: Source, values: Vec<u8>) -> NormalizedSeries {
    NormalizedSeries {
        subtopic_id: "t".into(),
        source,
        first_week: date("2023-01-02"),
        degenerate: values.iter().all(|&v| v == 0),
        values,
    }
}

/// Largest v in 0..=100 with v <= 100*s/max + 1/2, by exhaustive search.
pub fn rescale_oracle(values: &[u64]) -> Vec<u8> {
    let max = values.iter().copied().max().unwrap_or(0) as u128;
    if max == 0 {
        return vec![0; values.len()];
    }
    values
        .iter()
        .map(|&s| {
            let s = s as u128;
            (0..=100u128)
                .rev()
                .find(|&v| 2 * v * max <= 200 * s + max)
                .unwrap() as u8
        })
        .collect()
}

/// Label every week, then group equal adjacent labels.
pub fn episodes_oracle(values: &[i16], upper: f64, lower: f64, min_len: usize) -> Vec<Run> {
    let mask: Vec<Option<EpisodeKind>> = values
        .iter()
        .map(|&v| {
            let v = v as f64;
            if v > upper {
                Some(EpisodeKind::Overabundance)
            } else if v < lower {
                Some(EpisodeKind::Void)
            } else {
                None
            }
        })
        .collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < mask.len() {
        let mut j = i;
        while j + 1 < mask.len() && mask[j + 1] == mask[i] {
            j += 1;
        }
        if let Some(kind) = mask[i] {
            if j - i + 1 >= min_len.max(1) {
                out.push(Run {
                    kind,
                    start: i,
                    end: j,
                });
            }
        }
        i = j + 1;
    }
    out
}

/// Textbook single-pass Pearson over the pairs `(x[t], y[t+k])`.
pub fn lagged_pearson_oracle(x: &[f64], y: &[f64], k: i32) -> Option<f64> {
    let pairs: Vec<(f64, f64)> = (0..x.len() as i64)
        .filter_map(|t| {
            let u = t + k as i64;
            (u >= 0 && (u as usize) < y.len()).then(|| (x[t as usize], y[u as usize]))
        })
        .collect();
    let n = pairs.len() as f64;
    if pairs.len() < 3 {
        return None;
    }
    let (sx, sy) = pairs.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0, a.1 + p.1));
    let (mx, my) = (sx / n, sy / n);
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for &(a, b) in &pairs {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some(sxy / (sxx * syy).sqrt())
}

/// `x` with a lead of `k` weeks over `y`: `y[t + k] = x[t]` on the overlap.
pub fn shifted_pair(base: &[f64], k: i32, n: usize) -> (Vec<f64>, Vec<f64>) {
    let pad = k.unsigned_abs() as usize;
    assert!(base.len() >= n + 2 * pad);
    let x: Vec<f64> = base[pad..pad + n].to_vec();
    let y: Vec<f64> = (0..n)
        .map(|t| base[(pad as i64 + t as i64 - k as i64) as usize])
        .collect();
    (x, y)
}

pub fn read_tree(root: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in std::fs::read_dir(&dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let rel = path
                    .strip_prefix(root)
                    .unwrap()
                    .to_string_lossy()
                    .replace('\\', "/");
                out.push((rel, std::fs::read(&path).unwrap()));
            }
        }
    }
    out.sort();
    out
}

/// Loads the bundled corpus config with the output redirected.
pub fn corpus_config(output_dir: &Path) -> infodelta::RunConfig {
    let mut config = infodelta::RunConfig::load(&corpus_dir().join("run.toml")).unwrap();
    config.output_dir = output_dir.to_path_buf();
    config
}

/// Scripted HTTP server: answers the n-th connection with `script[n]`
/// (status, body) and records arrival times.
pub struct StubServer {
    pub base_url: String,
    pub arrivals: Arc<Mutex<Vec<(Instant, String)>>>,
}

impl StubServer {
    pub fn start(script: Vec<(u16, String)>) -> Self {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let base_url = format!("http://{}/api/v2/doc/doc", listener.local_addr().unwrap());
        let arrivals = Arc::new(Mutex::new(Vec::new()));
        let log = Arc::clone(&arrivals);
        std::thread::spawn(move || {
            for (i, stream) in listener.incoming().enumerate() {
                let Ok(mut stream) = stream else { break };
                let at = Instant::now();
                let mut reader = BufReader::new(stream.try_clone().unwrap());
                let mut request_line = String::new();
                reader.read_line(&mut request_line).unwrap();
                loop {
                    let mut line = String::new();
                    if reader.read_line(&mut line).unwrap() == 0 || line == "\r\n" {
                        break;
                    }
                }
                log.lock()
                    .unwrap()
                    .push((at, request_line.trim().to_string()));
                let (status, body) = script
                    .get(i)
                    .cloned()
                    .unwrap_or((500, "script exhausted".into()));
                let reply = format!(
                    "HTTP/1.1 {status} Scripted\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
                    body.len()
                );
                let _ = stream.write_all(reply.as_bytes());
            }
        });
        StubServer { base_url, arrivals }
    }

    pub fn arrivals(&self) -> Vec<(Instant, String)> {
        self.arrivals.lock().unwrap().clone()
    }
}

pub fn timeline_body(points: &[(&str, u64)]) -> String {
    let data: Vec<String> = points
        .iter()
        .map(|(d, v)| format!(r#"{{"date":"{}T000000Z","value":{v}}}"#, d.replace('-', "")))
        .collect();
    format!(
        r#"{{"query_details":{{"title":"stub"}},"timeline":[{{"series":"Article Count","data":[{}]}}]}}"#,
        data.join(",")
    )
}

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::{DeltaSeries, Thresholds};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EpisodeKind {
    /// Delta strictly below the lower threshold.
    Void,
    /// Delta strictly above the upper threshold.
    Overabundance,
}

/// Maximal run of qualifying weeks, as inclusive week indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Run {
    pub kind: EpisodeKind,
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Episode {
    pub kind: EpisodeKind,
    pub start_week: NaiveDate,
    /// Inclusive.
    pub end_week: NaiveDate,
    pub weeks: usize,
    /// Most extreme delta in the run (minimum for voids, maximum otherwise).
    pub peak_value: i16,
    pub mean_value: f64,
}

fn classify(v: f64, th: &Thresholds) -> Option<EpisodeKind> {
    if v > th.upper {
        Some(EpisodeKind::Overabundance)
    } else if v < th.lower {
        Some(EpisodeKind::Void)
    } else {
        None
    }
}

/// Runs of at least `min_len` consecutive exceeding weeks, ordered by start.
/// `min_len` of 0 is treated as 1.
pub fn find_runs(values: &[i16], th: &Thresholds, min_len: usize) -> Vec<Run> {
    let min_len = min_len.max(1);
    let mut runs = Vec::new();
    let mut current: Option<Run> = None;
    for (i, &v) in values.iter().enumerate() {
        let kind = classify(v as f64, th);
        match (&mut current, kind) {
            (Some(run), Some(k)) if run.kind == k => run.end = i,
            (_, k) => {
                if let Some(run) = current.take() {
                    if run.end - run.start + 1 >= min_len {
                        runs.push(run);
                    }
                }
                current = k.map(|kind| Run {
                    kind,
                    start: i,
                    end: i,
                });
            }
        }
    }
    if let Some(run) = current {
        if run.end - run.start + 1 >= min_len {
            runs.push(run);
        }
    }
    runs
}

pub fn detect_episodes(delta: &DeltaSeries, th: &Thresholds, min_len: usize) -> Vec<Episode> {
    find_runs(&delta.values, th, min_len)
        .into_iter()
        .map(|run| {
            let slice = &delta.values[run.start..=run.end];
            let peak_value = match run.kind {
                EpisodeKind::Void => *slice.iter().min().expect("non-empty run"),
                EpisodeKind::Overabundance => *slice.iter().max().expect("non-empty run"),
            };
            Episode {
                kind: run.kind,
                start_week: delta.week(run.start),
                end_week: delta.week(run.end),
                weeks: slice.len(),
                peak_value,
                mean_value: slice.iter().map(|&v| v as f64).sum::<f64>() / slice.len() as f64,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::Source;

    fn ds(values: &[i16]) -> DeltaSeries {
        DeltaSeries {
            subtopic_id: "s".into(),
            supply_source: Source::Facebook,
            first_week: NaiveDate::from_ymd_opt(2023, 1, 2).unwrap(),
            values: values.to_vec(),
        }
    }

    const TH: Thresholds = Thresholds {
        upper: 30.0,
        lower: -40.0,
    };

    #[test]
    fn void_run() {
        let eps = detect_episodes(&ds(&[-50, -50, 10]), &TH, 1);
        assert_eq!(eps.len(), 1);
        let e = &eps[0];
        assert_eq!(e.kind, EpisodeKind::Void);
        assert_eq!(e.start_week, NaiveDate::from_ymd_opt(2023, 1, 2).unwrap());
        assert_eq!(e.end_week, NaiveDate::from_ymd_opt(2023, 1, 9).unwrap());
        assert_eq!(e.peak_value, -50);
        assert_eq!(e.mean_value, -50.0);
    }

    #[test]
    fn zeros_and_single_week() {
        assert!(detect_episodes(&ds(&[0, 0, 0]), &TH, 1).is_empty());
        let eps = detect_episodes(&ds(&[35]), &TH, 1);
        assert_eq!(eps.len(), 1);
        assert_eq!(eps[0].kind, EpisodeKind::Overabundance);
        assert_eq!(eps[0].weeks, 1);
    }

    #[test]
    fn boundaries_are_neutral_and_kinds_split_runs() {
        assert!(detect_episodes(&ds(&[30, -40]), &TH, 1).is_empty());
        let runs = find_runs(&[31, -41, -41, 31], &TH, 1);
        assert_eq!(
            runs,
            vec![
                Run {
                    kind: EpisodeKind::Overabundance,
                    start: 0,
                    end: 0
                },
                Run {
                    kind: EpisodeKind::Void,
                    start: 1,
                    end: 2
                },
                Run {
                    kind: EpisodeKind::Overabundance,
                    start: 3,
                    end: 3
                },
            ]
        );
        assert_eq!(find_runs(&[31, -41, -41, 31], &TH, 2).len(), 1);
    }
}

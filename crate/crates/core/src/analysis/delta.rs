use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::{mean, AnalysisError};
use crate::series::{add_weeks, NormalizedSeries, Source};

/// Weekly normalized supply minus normalized demand, in `[-100, 100]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeltaSeries {
    pub subtopic_id: String,
    pub supply_source: Source,
    pub first_week: NaiveDate,
    pub values: Vec<i16>,
}

impl DeltaSeries {
    pub fn week(&self, index: usize) -> NaiveDate {
        add_weeks(self.first_week, index)
    }
}

/// Exceedance thresholds: mean supply above zero, negated mean demand below.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub upper: f64,
    pub lower: f64,
}

pub fn delta(
    supply: &NormalizedSeries,
    demand: &NormalizedSeries,
) -> Result<DeltaSeries, AnalysisError> {
    if supply.first_week != demand.first_week || supply.values.len() != demand.values.len() {
        return Err(AnalysisError::AlignmentError(format!(
            "supply covers {} weeks from {}, demand {} weeks from {}",
            supply.values.len(),
            supply.first_week,
            demand.values.len(),
            demand.first_week
        )));
    }
    Ok(DeltaSeries {
        subtopic_id: supply.subtopic_id.clone(),
        supply_source: supply.source,
        first_week: supply.first_week,
        values: supply
            .values
            .iter()
            .zip(&demand.values)
            .map(|(&s, &d)| s as i16 - d as i16)
            .collect(),
    })
}

pub fn thresholds(supply: &NormalizedSeries, demand: &NormalizedSeries) -> Thresholds {
    let s: Vec<f64> = supply.values.iter().map(|&v| v as f64).collect();
    let d: Vec<f64> = demand.values.iter().map(|&v| v as f64).collect();
    Thresholds {
        upper: mean(&s),
        lower: -mean(&d),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(source: Source, v: &[u8]) -> NormalizedSeries {
        NormalizedSeries {
            subtopic_id: "s".into(),
            source,
            first_week: NaiveDate::from_ymd_opt(2023, 1, 2).unwrap(),
            values: v.to_vec(),
            degenerate: false,
        }
    }

    #[test]
    fn delta_examples() {
        let d = |s: &[u8], t: &[u8]| {
            delta(&n(Source::Facebook, s), &n(Source::Trends, t))
                .unwrap()
                .values
        };
        assert_eq!(d(&[50], &[70]), vec![-20]);
        assert_eq!(d(&[1, 2, 3], &[1, 2, 3]), vec![0, 0, 0]);
        assert_eq!(d(&[100], &[0]), vec![100]);
        assert_eq!(d(&[0], &[100]), vec![-100]);
    }

    #[test]
    fn misaligned_delta() {
        let mut b = n(Source::Trends, &[1]);
        b.first_week = NaiveDate::from_ymd_opt(2023, 1, 9).unwrap();
        assert!(matches!(
            delta(&n(Source::Facebook, &[1]), &b),
            Err(AnalysisError::AlignmentError(_))
        ));
        assert!(delta(&n(Source::Facebook, &[1, 2]), &n(Source::Trends, &[1])).is_err());
    }

    #[test]
    fn threshold_examples() {
        let t = thresholds(
            &n(Source::Facebook, &[30, 30]),
            &n(Source::Trends, &[45, 45]),
        );
        assert_eq!(
            t,
            Thresholds {
                upper: 30.0,
                lower: -45.0
            }
        );
        let t = thresholds(
            &n(Source::Facebook, &[10, 20, 30]),
            &n(Source::Trends, &[0, 0, 0]),
        );
        assert_eq!(t.upper, 20.0);
        assert_eq!(t.lower, 0.0);
        let t = thresholds(&n(Source::Facebook, &[0, 0]), &n(Source::Trends, &[10, 0]));
        assert_eq!(t.upper, 0.0);
    }
}

use super::{pearson, AnalysisError, Correlation, DeltaSeries, DesignMatrix};
use crate::series::EngagementSeries;

/// `log10(1 + x)`.
pub fn log_engagement(x: u64) -> f64 {
    (1.0 + x as f64).log10()
}

fn check_aligned(delta: &DeltaSeries, eng: &EngagementSeries) -> Result<(), AnalysisError> {
    if delta.first_week != eng.first_week || delta.values.len() != eng.len() {
        return Err(AnalysisError::AlignmentError(format!(
            "delta covers {} weeks from {}, engagement {} weeks from {}",
            delta.values.len(),
            delta.first_week,
            eng.len(),
            eng.first_week
        )));
    }
    Ok(())
}

/// Pearson correlation between weekly delta and `log10(1 + engagement)`.
pub fn engagement_correlation(
    delta: &DeltaSeries,
    eng: &EngagementSeries,
) -> Result<Correlation, AnalysisError> {
    check_aligned(delta, eng)?;
    let d: Vec<f64> = delta.values.iter().map(|&v| v as f64).collect();
    let e: Vec<f64> = eng
        .engagement_sum
        .iter()
        .map(|&v| log_engagement(v))
        .collect();
    Ok(pearson(&d, &e))
}

/// Regression rows for weeks with at least one post:
/// `log10(1 + engagement) ~ 1 + delta + log10(1 + mean followers per post)`.
pub fn engagement_design(
    delta: &DeltaSeries,
    eng: &EngagementSeries,
) -> Result<(Vec<f64>, DesignMatrix), AnalysisError> {
    check_aligned(delta, eng)?;
    let mut y = Vec::new();
    let mut rows = Vec::new();
    for i in 0..eng.len() {
        let posts = eng.post_count[i];
        if posts == 0 {
            continue;
        }
        let followers = eng.followers_sum[i] as f64 / posts as f64;
        y.push(log_engagement(eng.engagement_sum[i]));
        rows.push(vec![1.0, delta.values[i] as f64, (1.0 + followers).log10()]);
    }
    Ok((y, DesignMatrix::from_rows(rows)?))
}

//! Supply–demand delta, void/overabundance episodes, lagged correlation and
//! delta–engagement statistics.

mod delta;
mod engagement;
mod episodes;
mod ols;
mod stats;
mod xcorr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use delta::{delta, thresholds, DeltaSeries, Thresholds};
pub use engagement::{engagement_correlation, engagement_design, log_engagement};
pub use episodes::{detect_episodes, find_runs, Episode, EpisodeKind, Run};
pub use ols::{ols_fit, DesignMatrix, OlsFit};
pub use stats::{mean, pearson};
pub use xcorr::{cross_correlation, LagCorrelation, LAG_CONVENTION};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("series are not aligned: {0}")]
    AlignmentError(String),
    #[error("series too short for correlation: n = {0} (need at least 3)")]
    TooShort(usize),
    #[error("max lag {max_lag} too large for n = {n} (need max_lag < n - 2)")]
    InvalidLag { max_lag: usize, n: usize },
    #[error("design matrix is rank deficient")]
    RankDeficient,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UndefinedReason {
    /// Fewer than three overlapping pairs.
    ShortOverlap,
    ZeroVariance,
}

/// A correlation coefficient that may be undefined. Undefined values are
/// never reported as zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Correlation {
    Defined(f64),
    Undefined(UndefinedReason),
}

impl Correlation {
    pub fn value(self) -> Option<f64> {
        match self {
            Correlation::Defined(r) => Some(r),
            Correlation::Undefined(_) => None,
        }
    }

    pub fn reason(self) -> Option<UndefinedReason> {
        match self {
            Correlation::Defined(_) => None,
            Correlation::Undefined(reason) => Some(reason),
        }
    }
}

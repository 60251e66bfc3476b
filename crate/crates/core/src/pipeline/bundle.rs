//! Per-(subtopic, supply source) analysis result, serialized as one JSON
//! document with every real printed to six decimals.

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::analysis::{Episode, EpisodeKind, LagCorrelation, OlsFit, Thresholds, UndefinedReason};
use crate::fmt::Fixed6;
use crate::series::Source;

pub const BUNDLE_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparator {
    DemandExceedsSupply,
    SupplyExceedsDemand,
    Equal,
}

impl Comparator {
    pub fn of(supply: u64, demand: u64) -> Self {
        match supply.cmp(&demand) {
            std::cmp::Ordering::Less => Comparator::DemandExceedsSupply,
            std::cmp::Ordering::Greater => Comparator::SupplyExceedsDemand,
            std::cmp::Ordering::Equal => Comparator::Equal,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Comparator::DemandExceedsSupply => "demand_exceeds_supply",
            Comparator::SupplyExceedsDemand => "supply_exceeds_demand",
            Comparator::Equal => "equal",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupplyBlock {
    pub raw: Vec<u64>,
    pub normalized: Vec<u8>,
    /// All-zero raw series.
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemandBlock {
    pub normalized: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CumulativeBlock {
    pub supply: u64,
    pub demand: u64,
    pub comparator: Comparator,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdsOut {
    pub upper: Fixed6,
    pub lower: Fixed6,
}

impl From<Thresholds> for ThresholdsOut {
    fn from(t: Thresholds) -> Self {
        ThresholdsOut {
            upper: Fixed6(t.upper),
            lower: Fixed6(t.lower),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeOut {
    pub kind: EpisodeKind,
    pub start_week: NaiveDate,
    pub end_week: NaiveDate,
    pub weeks: usize,
    pub peak_value: i16,
    pub mean_value: Fixed6,
}

impl From<&Episode> for EpisodeOut {
    fn from(e: &Episode) -> Self {
        EpisodeOut {
            kind: e.kind,
            start_week: e.start_week,
            end_week: e.end_week,
            weeks: e.weeks,
            peak_value: e.peak_value,
            mean_value: Fixed6(e.mean_value),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EngagementBlock {
    /// `log10(1 + weekly engagement)`.
    pub log_engagement: Vec<Fixed6>,
    pub post_count: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OlsBlock {
    pub response: String,
    pub predictors: Vec<String>,
    pub coefficients: Vec<Fixed6>,
    pub r_squared: Option<Fixed6>,
    pub n: usize,
}

impl OlsBlock {
    pub fn engagement(fit: &OlsFit) -> Self {
        OlsBlock {
            response: "log10(1 + engagement)".into(),
            predictors: vec![
                "intercept".into(),
                "delta".into(),
                "log10(1 + mean followers per post)".into(),
            ],
            coefficients: fit.coefficients.iter().copied().map(Fixed6).collect(),
            r_squared: fit.r_squared.map(Fixed6),
            n: fit.n,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bundle {
    pub schema_version: u32,
    pub subtopic_id: String,
    pub topic: String,
    pub supply_source: Source,
    pub first_week: NaiveDate,
    pub weeks: usize,
    pub supply: SupplyBlock,
    pub demand: DemandBlock,
    pub cumulative: CumulativeBlock,
    pub delta: Vec<i16>,
    pub thresholds: ThresholdsOut,
    pub min_episode_len: usize,
    pub episodes: Vec<EpisodeOut>,
    pub lag_correlation: LagCorrelation,
    pub lag0_r: Option<Fixed6>,
    pub engagement: Option<EngagementBlock>,
    /// Correlation of delta with log engagement; `null` when undefined or
    /// not applicable, with the reason in `engagement_r_note`.
    pub engagement_r: Option<Fixed6>,
    pub engagement_r_note: Option<String>,
    pub ols: Option<OlsBlock>,
    pub ols_note: Option<String>,
}

pub fn reason_str(reason: UndefinedReason) -> &'static str {
    match reason {
        UndefinedReason::ShortOverlap => "short_overlap",
        UndefinedReason::ZeroVariance => "zero_variance",
    }
}

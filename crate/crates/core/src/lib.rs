//! Batch analytics for information supply (posts, news volume) versus
//! information demand (search interest) over a topic taxonomy.
//!
//! The pipeline buckets evidence into ISO weeks, rescales every series onto
//! 0–100, takes the weekly supply-minus-demand delta, and from it derives
//! void/overabundance episodes, lagged supply–demand correlation and
//! delta–engagement statistics.

pub mod analysis;
pub mod fmt;
pub mod ingest;
pub mod par;
pub mod pipeline;
pub mod report;
pub mod series;
pub mod taxonomy;

pub use analysis::{
    cross_correlation, delta, detect_episodes, engagement_correlation, ols_fit, thresholds,
    AnalysisError, Correlation, DeltaSeries, Episode, EpisodeKind, LagCorrelation, OlsFit,
    Thresholds,
};
pub use ingest::{IngestError, PostRecord};
pub use par::Execution;
pub use pipeline::{run_all, PipelineError, RunConfig};
pub use series::{
    aggregate_weekly, align, cumulative, rescale, week_of, EngagementSeries, NormalizedSeries,
    RawSeries, SeriesError, Source, Window,
};
pub use taxonomy::{load_taxonomy, parse_query, BooleanQuery, Taxonomy, TaxonomyError};

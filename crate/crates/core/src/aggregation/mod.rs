//! Polarity alignment, ECDF normalization, independent-copula aggregation
//! into trust-dimension indices, profile-weighted trustworthiness indices,
//! fold-uncertainty-aware ranking, checkpoint selection and list overlap.

mod ecdf;
mod index;
mod overlap;
mod pool;
mod profile;
mod ranking;
mod record;
mod selection;

pub use ecdf::Ecdf;
pub use index::{dimension_index, geo_mean_deviation, trustworthiness_index, DimensionValues};
pub use overlap::overlap_at_k;
pub use pool::{score_items, ItemKey, ItemScores, MetricScore, PoolScope};
pub use profile::{load_profiles, parse_profiles, preset_profiles, TrustProfile};
pub use ranking::{
    rank_models, rank_with_uncertainty, summarize_models, uncertainty_score, DimensionIndexSummary, ModelSummary,
    RankedEntry, Ranking, DELTA_FLOOR,
};
pub use record::{
    align_polarity, read_records, registered_metric, write_records, MetricRecord, Polarity, RecordContext, Split,
    TrustDimension,
};
pub use selection::{select_checkpoint, select_checkpoint_from_records, CheckpointSelection};

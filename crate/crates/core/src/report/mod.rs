//! End-to-end audits: configuration, orchestration over folds and
//! candidate models, threshold warnings, and JSON/Markdown reports.

mod audit;
mod config;
mod model;
mod render;
mod warnings;

pub use audit::{fidelity_privacy_indices, run_audit, run_audit_with_data};
pub use config::{
    AuditConfig, DataConfig, FoldConfig, MetricsConfig, RankingConfig, SeedConfig, SyntheticFile, SyntheticSource,
    WarningThresholds, THREADS_ENV,
};
pub use model::{
    AuditReport, Disclosure, FoldSummary, ModelInfo, RealDataSummary, ReportMetadata, Severity, WarningMessage,
    REPORT_FORMAT_VERSION,
};
pub use render::{
    render_json, render_markdown, BreakdownRow, DimensionRow, IndexCell, ProfileView, RankedRow, RankingView,
    ReportDocument,
};
pub use warnings::evaluate_warnings;

use serde::{Deserialize, Serialize};

use crate::aggregation::{MetricRecord, ModelSummary, Ranking, TrustDimension, TrustProfile};
use crate::data::{ColumnSpec, SplitRatios};

/// Bumped whenever the JSON layout changes incompatibly.
pub const REPORT_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Info,
    Warn,
    Fail,
}

impl Severity {
    pub fn label(self) -> &'static str {
        match self {
            Severity::Info => "info",
            Severity::Warn => "warn",
            Severity::Fail => "fail",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WarningMessage {
    pub code: String,
    pub severity: Severity,
    #[serde(default)]
    pub model_id: Option<String>,
    #[serde(default)]
    pub dimension: Option<TrustDimension>,
    #[serde(default)]
    pub metric: Option<String>,
    #[serde(default)]
    pub threshold: Option<f64>,
    #[serde(default)]
    pub value: Option<f64>,
    pub text: String,
}

impl WarningMessage {
    pub fn new(code: &str, severity: Severity, text: impl Into<String>) -> Self {
        WarningMessage {
            code: code.into(),
            severity,
            model_id: None,
            dimension: None,
            metric: None,
            threshold: None,
            value: None,
            text: text.into(),
        }
    }

    pub fn model(mut self, model_id: &str) -> Self {
        self.model_id = Some(model_id.into());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealDataSummary {
    pub path: String,
    pub rows: usize,
    pub dropped_rows: usize,
    pub columns: Vec<ColumnSpec>,
    pub target: String,
    pub positive_value: String,
    pub protected: String,
    pub privileged_value: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldSummary {
    pub fold_id: usize,
    pub seed: u64,
    pub train_rows: usize,
    pub val_rows: usize,
    pub test_rows: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelInfo {
    pub model_id: String,
    /// Generator label, or `files`.
    pub source: String,
    pub checkpoints: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportMetadata {
    pub tool: String,
    pub version: String,
    /// Wall-clock stamp; the only field allowed to differ between reruns.
    #[serde(default)]
    pub generated_at: Option<String>,
    pub config_digest: String,
    pub base_seed: u64,
    pub dataset_id: String,
    pub real_data: RealDataSummary,
    pub ratios: SplitRatios,
    pub folds: Vec<FoldSummary>,
    pub models: Vec<ModelInfo>,
    pub alpha: f64,
    pub validation_records: bool,
    pub config: serde_json::Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Disclosure {
    pub topic: String,
    pub text: String,
}

/// Everything an audit produces. Rendered to JSON or Markdown by
/// [`render_json`](super::render_json) and
/// [`render_markdown`](super::render_markdown).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub format_version: u32,
    pub metadata: ReportMetadata,
    pub profiles: Vec<TrustProfile>,
    pub rankings: Vec<Ranking>,
    pub dimension_tables: Vec<ModelSummary>,
    pub records: Vec<MetricRecord>,
    pub warnings: Vec<WarningMessage>,
    pub disclosures: Vec<Disclosure>,
}

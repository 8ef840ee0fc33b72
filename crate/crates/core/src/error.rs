use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = AuditError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum AuditError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("csv error in {path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("invalid json in {context}: {source}")]
    Json {
        context: String,
        #[source]
        source: serde_json::Error,
    },
    #[error("invalid schema: {0}")]
    Schema(String),
    #[error("header mismatch: expected columns {expected:?}, found {found:?}")]
    HeaderMismatch { expected: Vec<String>, found: Vec<String> },
    #[error("zero surviving rows after dropping {dropped} incomplete rows")]
    NoRows { dropped: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("too few rows for {what}: need at least {need}, got {got}")]
    TooFewRows {
        what: &'static str,
        need: usize,
        got: usize,
    },
    #[error("training labels contain a single class")]
    SingleClass,
    #[error("degenerate fairness group: {0}")]
    DegenerateGroup(String),
    #[error("profile {profile} needs the {dimension} index, which is missing")]
    MissingDimension { profile: String, dimension: String },
    #[error("every metric of dimension {0} is missing")]
    AllMetricsMissing(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("stage {stage} failed: {source}")]
    Stage {
        stage: String,
        #[source]
        source: Box<AuditError>,
    },
}

impl AuditError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        AuditError::InvalidArgument(msg.into())
    }

    /// Wraps an error with the audit stage that produced it.
    pub fn in_stage(self, stage: impl Into<String>) -> Self {
        AuditError::Stage {
            stage: stage.into(),
            source: Box::new(self),
        }
    }

    /// True for errors caused by user input (files, schema, config values)
    /// rather than by a failing computation.
    pub fn is_config_error(&self) -> bool {
        match self {
            AuditError::Io { .. }
            | AuditError::Csv { .. }
            | AuditError::Json { .. }
            | AuditError::Schema(_)
            | AuditError::HeaderMismatch { .. }
            | AuditError::InvalidArgument(_) => true,
            AuditError::Stage { source, .. } => source.is_config_error(),
            _ => false,
        }
    }
}

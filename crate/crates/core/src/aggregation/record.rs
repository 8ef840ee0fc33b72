use std::fmt;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{AuditError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TrustDimension {
    Fidelity,
    Privacy,
    Utility,
    Fairness,
    Robustness,
}

impl TrustDimension {
    /// Canonical order of weight vectors: (F, P, U, Fair, R).
    pub const ALL: [TrustDimension; 5] = [
        TrustDimension::Fidelity,
        TrustDimension::Privacy,
        TrustDimension::Utility,
        TrustDimension::Fairness,
        TrustDimension::Robustness,
    ];

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for TrustDimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Sign that makes larger aligned values mean lower risk. Serialized as
/// `1` / `-1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "i8", try_from = "i8")]
pub enum Polarity {
    Positive,
    Negative,
}

impl Polarity {
    pub fn sign(self) -> f64 {
        match self {
            Polarity::Positive => 1.0,
            Polarity::Negative => -1.0,
        }
    }
}

impl From<Polarity> for i8 {
    fn from(p: Polarity) -> i8 {
        p.sign() as i8
    }
}

impl TryFrom<i8> for Polarity {
    type Error = String;
    fn try_from(v: i8) -> std::result::Result<Self, String> {
        match v {
            1 => Ok(Polarity::Positive),
            -1 => Ok(Polarity::Negative),
            other => Err(format!("polarity must be 1 or -1, got {other}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Val,
    Test,
    None,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct RecordContext {
    pub dataset_id: String,
    pub model_id: String,
    pub fold_id: usize,
    #[serde(default)]
    pub checkpoint_id: u32,
    #[serde(default)]
    pub classifier_seed: Option<u64>,
}

/// One metric evaluation. `value: None` marks a metric that could not be
/// computed; it is excluded from aggregation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricRecord {
    pub metric: String,
    pub dimension: TrustDimension,
    pub polarity: Polarity,
    pub value: Option<f64>,
    pub context: RecordContext,
    pub split: Split,
}

impl MetricRecord {
    /// Record for a registered metric name; dimension and polarity come from
    /// the registry.
    pub fn registered(metric: impl Into<String>, value: Option<f64>, context: RecordContext, split: Split) -> Self {
        let metric = metric.into();
        let (dimension, polarity) =
            registered_metric(&metric).unwrap_or_else(|| panic!("metric {metric} is not registered"));
        MetricRecord {
            metric,
            dimension,
            polarity,
            value,
            context,
            split,
        }
    }

    /// Checks the value is finite (or missing) and, for registered names,
    /// that dimension and polarity agree with the registry.
    pub fn validate(&self) -> Result<()> {
        if let Some(v) = self.value {
            if !v.is_finite() {
                return Err(AuditError::invalid(format!(
                    "metric {} has a non-finite value",
                    self.metric
                )));
            }
        }
        if let Some((dim, pol)) = registered_metric(&self.metric) {
            if dim != self.dimension || pol != self.polarity {
                return Err(AuditError::invalid(format!(
                    "metric {} is registered as {dim} with polarity {}",
                    self.metric,
                    pol.sign()
                )));
            }
        }
        Ok(())
    }
}

/// `p · m`; missing values stay missing.
pub fn align_polarity(record: &MetricRecord) -> Option<f64> {
    record.value.map(|v| record.polarity.sign() * v)
}

const CLASSIFIERS: [&str; 3] = ["LR", "KNN", "MLP"];
const SCORES: [&str; 4] = ["accuracy", "precision", "recall", "f1"];

/// Strips an optional `_seed<digits>` suffix.
fn strip_seed(name: &str) -> &str {
    if let Some(pos) = name.rfind("_seed") {
        let digits = &name[pos + 5..];
        if !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit()) {
            return &name[..pos];
        }
    }
    name
}

/// Dimension and polarity of the metrics this crate emits. Names outside
/// the table are accepted from external records as given.
pub fn registered_metric(name: &str) -> Option<(TrustDimension, Polarity)> {
    use Polarity::*;
    use TrustDimension::*;
    if name.starts_with("ChiSq_") {
        return Some((Fidelity, Negative));
    }
    match name {
        "MutualInformation_l2" | "MMD_snr" | "FID" => return Some((Fidelity, Negative)),
        "MMD_p_value" | "knnPrecision" | "knnRecall" => return Some((Fidelity, Positive)),
        "ReplicatedRows" => return Some((Privacy, Negative)),
        _ => {}
    }
    for space in ["NNRaw", "NNEmb"] {
        for k in [1, 3, 5] {
            for stat in ["mean", "median"] {
                if name == format!("{space}_k{k}_{stat}") {
                    return Some((Privacy, Positive));
                }
            }
        }
    }
    let base = strip_seed(name);
    let (clf, rest) = base.split_once('_')?;
    if !CLASSIFIERS.contains(&clf) {
        return None;
    }
    if SCORES.contains(&rest) {
        return Some((Utility, Positive));
    }
    if ["EOD", "AOD", "EqOdds"].contains(&rest) {
        return Some((Fairness, Negative));
    }
    if let Some(s) = rest.strip_prefix("adv_") {
        return SCORES.contains(&s).then_some((Robustness, Positive));
    }
    if let Some(s) = rest.strip_prefix("delta_") {
        return SCORES.contains(&s).then_some((Robustness, Negative));
    }
    None
}

/// Reads JSON-lines records, skipping blank lines.
pub fn read_records<R: BufRead>(reader: R) -> Result<Vec<MetricRecord>> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|source| AuditError::Io {
            path: "<records>".into(),
            source,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: MetricRecord = serde_json::from_str(&line).map_err(|source| AuditError::Json {
            context: format!("record line {}", i + 1),
            source,
        })?;
        rec.validate()?;
        out.push(rec);
    }
    Ok(out)
}

pub fn write_records<W: Write>(mut writer: W, records: &[MetricRecord]) -> Result<()> {
    for r in records {
        let line = serde_json::to_string(r).map_err(|source| AuditError::Json {
            context: "record".into(),
            source,
        })?;
        writeln!(writer, "{line}").map_err(|source| AuditError::Io {
            path: "<records>".into(),
            source,
        })?;
    }
    Ok(())
}

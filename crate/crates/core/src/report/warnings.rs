use std::collections::BTreeMap;

use super::config::WarningThresholds;
use super::model::{Severity, WarningMessage};
use crate::aggregation::{MetricRecord, ModelSummary, TrustDimension};

fn checkpoint_suffix(summary: &ModelSummary, multi: bool) -> String {
    if multi {
        format!(" at checkpoint {}", summary.checkpoint_id)
    } else {
        String::new()
    }
}

/// Threshold checks over the records and per-model index summaries. Output
/// order is deterministic: by rule, then model id, then checkpoint.
pub fn evaluate_warnings(
    records: &[MetricRecord],
    summaries: &[ModelSummary],
    thresholds: &WarningThresholds,
) -> Vec<WarningMessage> {
    let mut out = Vec::new();

    let mut replicated: BTreeMap<&str, f64> = BTreeMap::new();
    let mut degenerate: BTreeMap<&str, usize> = BTreeMap::new();
    for r in records {
        if r.metric == "ReplicatedRows" {
            if let Some(v) = r.value {
                let e = replicated.entry(&r.context.model_id).or_insert(v);
                *e = e.max(v);
            }
        }
        if r.dimension == TrustDimension::Fairness && r.value.is_none() {
            *degenerate.entry(&r.context.model_id).or_default() += 1;
        }
    }
    let max = thresholds.replicated_rows_max as f64;
    for (model, v) in replicated {
        if v > max {
            out.push(WarningMessage {
                metric: Some("ReplicatedRows".into()),
                dimension: Some(TrustDimension::Privacy),
                threshold: Some(max),
                value: Some(v),
                ..WarningMessage::new(
                    "replicated_rows",
                    Severity::Warn,
                    format!(
                        "{model}: up to {v} synthetic rows exactly replicate real training rows \
                         (threshold: more than {} flags)",
                        thresholds.replicated_rows_max
                    ),
                )
                .model(model)
            });
        }
    }

    let mut checkpoints: BTreeMap<&str, usize> = BTreeMap::new();
    for s in summaries {
        *checkpoints.entry(&s.model_id).or_default() += 1;
    }
    let index_rules = [
        (
            TrustDimension::Privacy,
            thresholds.privacy_index_min,
            "low_privacy_index",
        ),
        (
            TrustDimension::Fairness,
            thresholds.fairness_index_min,
            "low_fairness_index",
        ),
    ];
    for (dim, min, code) in index_rules {
        for s in summaries {
            let Some(d) = s.dimension(dim) else { continue };
            if d.mean < min {
                let at = checkpoint_suffix(s, checkpoints[s.model_id.as_str()] > 1);
                out.push(WarningMessage {
                    dimension: Some(dim),
                    threshold: Some(min),
                    value: Some(d.mean),
                    ..WarningMessage::new(
                        code,
                        Severity::Warn,
                        format!("{}{at}: mean {dim} index {:.4} is below {min}", s.model_id, d.mean),
                    )
                    .model(&s.model_id)
                });
            }
        }
    }

    for s in summaries {
        let at = checkpoint_suffix(s, checkpoints[s.model_id.as_str()] > 1);
        for dim in TrustDimension::ALL {
            if s.dimension(dim).is_some() {
                continue;
            }
            let present = s.folds.iter().filter(|(_, pi)| pi[dim.index()].is_some()).count();
            let (severity, text) = if present == 0 {
                (
                    Severity::Fail,
                    format!("{}{at}: no {dim} metric could be computed in any fold", s.model_id),
                )
            } else {
                (
                    Severity::Warn,
                    format!(
                        "{}{at}: the {dim} index is missing in {} of {} folds and is left out of the tables",
                        s.model_id,
                        s.folds.len() - present,
                        s.folds.len()
                    ),
                )
            };
            out.push(WarningMessage {
                dimension: Some(dim),
                ..WarningMessage::new("missing_dimension", severity, text).model(&s.model_id)
            });
        }
    }

    for (model, n) in degenerate {
        out.push(WarningMessage {
            dimension: Some(TrustDimension::Fairness),
            value: Some(n as f64),
            ..WarningMessage::new(
                "degenerate_fairness_group",
                Severity::Info,
                format!(
                    "{model}: {n} fairness values are missing because a protected group lacked \
                     positive or negative evaluation rows"
                ),
            )
            .model(model)
        });
    }
    out
}

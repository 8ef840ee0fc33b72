use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::index::{geo_mean_deviation, trustworthiness_index, DimensionValues};
use super::pool::{score_items, ItemScores, PoolScope};
use super::profile::TrustProfile;
use super::record::{MetricRecord, TrustDimension};
use super::selection::{select_checkpoint_from_records, CheckpointSelection};
use crate::error::{AuditError, Result};

/// Replaces a zero deviation when α > 0 so `log Δ` stays finite.
pub const DELTA_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimensionIndexSummary {
    pub dimension: TrustDimension,
    /// `(fold_id, π)` pairs.
    pub per_fold: Vec<(usize, f64)>,
    pub mean: f64,
    pub deviation: f64,
}

impl DimensionIndexSummary {
    pub fn from_folds(dimension: TrustDimension, per_fold: Vec<(usize, f64)>) -> Result<Self> {
        let values: Vec<f64> = per_fold.iter().map(|p| p.1).collect();
        let (mean, deviation) = geo_mean_deviation(&values)?;
        Ok(DimensionIndexSummary {
            dimension,
            per_fold,
            mean,
            deviation,
        })
    }

    /// Table cell such as `0.42 (0.09)`.
    pub fn cell(&self) -> String {
        format!("{:.2} ({:.2})", self.mean, self.deviation)
    }
}

/// Cross-fold summary of one model at one checkpoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSummary {
    pub dataset_id: String,
    pub model_id: String,
    pub checkpoint_id: u32,
    /// `(fold_id, π per dimension)`.
    pub folds: Vec<(usize, DimensionValues<f64>)>,
    /// Only dimensions present in every fold.
    pub dimensions: Vec<DimensionIndexSummary>,
}

impl ModelSummary {
    fn from_items(items: &[&ItemScores]) -> Result<Self> {
        let first = &items[0].key;
        let folds: Vec<(usize, DimensionValues<f64>)> = items.iter().map(|i| (i.key.fold_id, i.pi)).collect();
        let mut dimensions = Vec::new();
        for dim in TrustDimension::ALL {
            let per_fold: Option<Vec<(usize, f64)>> =
                folds.iter().map(|(f, pi)| pi[dim.index()].map(|p| (*f, p))).collect();
            if let Some(per_fold) = per_fold {
                dimensions.push(DimensionIndexSummary::from_folds(dim, per_fold)?);
            }
        }
        Ok(ModelSummary {
            dataset_id: first.dataset_id.clone(),
            model_id: first.model_id.clone(),
            checkpoint_id: first.checkpoint_id,
            folds,
            dimensions,
        })
    }

    pub fn dimension(&self, dim: TrustDimension) -> Option<&DimensionIndexSummary> {
        self.dimensions.iter().find(|d| d.dimension == dim)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedEntry {
    /// 1-based.
    pub rank: usize,
    pub summary: ModelSummary,
    /// `(fold_id, τ)`.
    pub tau_per_fold: Vec<(usize, f64)>,
    pub tau_mean: f64,
    pub tau_deviation: f64,
    /// `ln τ̄ − α ln Δ_τ`.
    pub score: f64,
    /// Present when the checkpoint was chosen on validation records.
    pub selection: Option<CheckpointSelection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ranking {
    pub profile: TrustProfile,
    pub alpha: f64,
    pub entries: Vec<RankedEntry>,
}

impl Ranking {
    pub fn model_order(&self) -> Vec<&str> {
        self.entries.iter().map(|e| e.summary.model_id.as_str()).collect()
    }
}

/// `R = ln τ̄ − α ln Δ_τ` (α = 0 ignores Δ entirely).
pub fn uncertainty_score(tau_mean: f64, tau_deviation: f64, alpha: f64) -> f64 {
    if alpha == 0.0 {
        tau_mean.ln()
    } else {
        tau_mean.ln() - alpha * tau_deviation.max(DELTA_FLOOR).ln()
    }
}

/// Orders `(model id, τ̄, Δ_τ)` triples by descending `R^α`; ties go to the
/// higher τ̄, then the lexicographically smaller id. Returns
/// `(input index, score)` in rank order.
pub fn rank_with_uncertainty(models: &[(&str, f64, f64)], alpha: f64) -> Result<Vec<(usize, f64)>> {
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(AuditError::invalid(format!(
            "alpha must be a finite value ≥ 0, got {alpha}"
        )));
    }
    for (id, tau, dev) in models {
        if !(*tau > 0.0 && *tau <= 1.0) || !(*dev >= 0.0) {
            return Err(AuditError::invalid(format!(
                "model {id}: τ̄ must lie in (0, 1] and Δ ≥ 0"
            )));
        }
    }
    let mut order: Vec<(usize, f64)> = models
        .iter()
        .enumerate()
        .map(|(i, (_, tau, dev))| (i, uncertainty_score(*tau, *dev, alpha)))
        .collect();
    order.sort_by(|a, b| {
        b.1.total_cmp(&a.1)
            .then(models[b.0].1.total_cmp(&models[a.0].1))
            .then(models[a.0].0.cmp(models[b.0].0))
    });
    Ok(order)
}

/// Cross-fold dimension summaries of every (dataset, model, checkpoint) in
/// the test/split-free records, scored in one shared pool.
pub fn summarize_models(records: &[MetricRecord], beta: Option<&BTreeMap<String, f64>>) -> Result<Vec<ModelSummary>> {
    let items = score_items(records, PoolScope::Ranking, beta)?;
    let mut grouped: BTreeMap<(&str, &str, u32), Vec<&ItemScores>> = BTreeMap::new();
    for item in &items {
        grouped
            .entry((&item.key.dataset_id, &item.key.model_id, item.key.checkpoint_id))
            .or_default()
            .push(item);
    }
    grouped.values().map(|g| ModelSummary::from_items(g)).collect()
}

/// Ranks every (dataset, model) in the test/split-free records under each
/// profile. All items share one ECDF pool. Models with several checkpoints
/// are first reduced to the checkpoint chosen on their validation records
/// for that profile.
pub fn rank_models(
    records: &[MetricRecord],
    profiles: &[TrustProfile],
    alpha: f64,
    beta: Option<&BTreeMap<String, f64>>,
) -> Result<Vec<Ranking>> {
    let items = score_items(records, PoolScope::Ranking, beta)?;
    // (dataset, model) -> checkpoint -> items over folds
    let mut grouped: BTreeMap<(&str, &str), BTreeMap<u32, Vec<&ItemScores>>> = BTreeMap::new();
    for item in &items {
        grouped
            .entry((&item.key.dataset_id, &item.key.model_id))
            .or_default()
            .entry(item.key.checkpoint_id)
            .or_default()
            .push(item);
    }

    profiles
        .iter()
        .map(|profile| {
            let mut candidates = Vec::new();
            for ((dataset, model), checkpoints) in &grouped {
                let (chosen, selection) = if checkpoints.len() == 1 {
                    (checkpoints.values().next().expect("one checkpoint"), None)
                } else {
                    let scoped: Vec<MetricRecord> = records
                        .iter()
                        .filter(|r| r.context.dataset_id == *dataset)
                        .cloned()
                        .collect();
                    let sel = select_checkpoint_from_records(&scoped, model, profile, alpha, beta)?;
                    let chosen = checkpoints.get(&sel.checkpoint_id).ok_or_else(|| {
                        AuditError::invalid(format!(
                            "model {model}: selected checkpoint {} has no test records",
                            sel.checkpoint_id
                        ))
                    })?;
                    (chosen, Some(sel))
                };
                let summary = ModelSummary::from_items(chosen)?;
                let tau_per_fold = summary
                    .folds
                    .iter()
                    .map(|(f, pi)| Ok((*f, trustworthiness_index(pi, profile)?)))
                    .collect::<Result<Vec<_>>>()?;
                let taus: Vec<f64> = tau_per_fold.iter().map(|t| t.1).collect();
                let (tau_mean, tau_deviation) = geo_mean_deviation(&taus)?;
                candidates.push((summary, tau_per_fold, tau_mean, tau_deviation, selection));
            }
            let keys: Vec<(&str, f64, f64)> = candidates.iter().map(|c| (c.0.model_id.as_str(), c.2, c.3)).collect();
            let order = rank_with_uncertainty(&keys, alpha)?;
            let mut slots: Vec<Option<_>> = candidates.into_iter().map(Some).collect();
            let entries = order
                .into_iter()
                .enumerate()
                .map(|(rank, (i, score))| {
                    let (summary, tau_per_fold, tau_mean, tau_deviation, selection) =
                        slots[i].take().expect("each index ranked once");
                    RankedEntry {
                        rank: rank + 1,
                        summary,
                        tau_per_fold,
                        tau_mean,
                        tau_deviation,
                        score,
                        selection,
                    }
                })
                .collect();
            Ok(Ranking {
                profile: profile.clone(),
                alpha,
                entries,
            })
        })
        .collect()
}

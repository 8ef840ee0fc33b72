use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::index::{geo_mean_deviation, trustworthiness_index, DimensionValues};
use super::pool::{score_items, PoolScope};
use super::profile::TrustProfile;
use super::ranking::uncertainty_score;
use super::record::MetricRecord;
use crate::error::{AuditError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckpointSelection {
    pub checkpoint_id: u32,
    /// `(checkpoint_id, validation score)` for every candidate, in checkpoint
    /// order. The score is `ln τ̄ − α ln Δ_τ` over folds.
    pub scores: Vec<(u32, f64)>,
}

/// Picks the checkpoint whose validation indices maximize the profile's
/// trustworthiness index across folds (geometric mean, with the same
/// volatility penalty as ranking when `alpha > 0`). Ties go to the earliest
/// checkpoint.
pub fn select_checkpoint(
    candidates: &[(u32, Vec<DimensionValues<f64>>)],
    profile: &TrustProfile,
    alpha: f64,
) -> Result<CheckpointSelection> {
    if candidates.is_empty() {
        return Err(AuditError::invalid("no checkpoints to select from"));
    }
    let mut scores = Vec::with_capacity(candidates.len());
    for (ckpt, folds) in candidates {
        let taus = folds
            .iter()
            .map(|pi| trustworthiness_index(pi, profile))
            .collect::<Result<Vec<f64>>>()?;
        let (mean, dev) = geo_mean_deviation(&taus)?;
        scores.push((*ckpt, uncertainty_score(mean, dev, alpha)));
    }
    scores.sort_by_key(|s| s.0);
    let mut best = scores[0];
    for &s in &scores[1..] {
        if s.1 > best.1 {
            best = s;
        }
    }
    Ok(CheckpointSelection {
        checkpoint_id: best.0,
        scores,
    })
}

/// Scores one model's validation-split and split-free records in a pool
/// spanning its folds and checkpoints, then selects a checkpoint.
pub fn select_checkpoint_from_records(
    records: &[MetricRecord],
    model_id: &str,
    profile: &TrustProfile,
    alpha: f64,
    beta: Option<&BTreeMap<String, f64>>,
) -> Result<CheckpointSelection> {
    let own: Vec<MetricRecord> = records
        .iter()
        .filter(|r| r.context.model_id == model_id)
        .cloned()
        .collect();
    if own.is_empty() {
        return Err(AuditError::invalid(format!("no records for model {model_id}")));
    }
    let items = score_items(&own, PoolScope::Selection, beta)?;
    let mut by_ckpt: BTreeMap<u32, Vec<DimensionValues<f64>>> = BTreeMap::new();
    for item in items {
        by_ckpt.entry(item.key.checkpoint_id).or_default().push(item.pi);
    }
    let candidates: Vec<_> = by_ckpt.into_iter().collect();
    select_checkpoint(&candidates, profile, alpha)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_hot(i: usize) -> TrustProfile {
        let mut w = [0.0; 5];
        w[i] = 1.0;
        TrustProfile::from_raw("x", w).unwrap()
    }

    #[test]
    fn single_and_dominant() {
        let pi = [Some(0.5); 5];
        let s = select_checkpoint(&[(7, vec![pi])], &one_hot(0), 0.0).unwrap();
        assert_eq!(s.checkpoint_id, 7);
        let better = [Some(0.6); 5];
        for d in 0..5 {
            let s = select_checkpoint(&[(0, vec![pi]), (1, vec![better])], &one_hot(d), 0.0).unwrap();
            assert_eq!(s.checkpoint_id, 1);
        }
        assert!(select_checkpoint(&[], &one_hot(0), 0.0).is_err());
    }

    #[test]
    fn ties_pick_earliest() {
        let pi = [Some(0.5); 5];
        let s = select_checkpoint(&[(3, vec![pi]), (1, vec![pi]), (2, vec![pi])], &one_hot(2), 0.0).unwrap();
        assert_eq!(s.checkpoint_id, 1);
    }
}

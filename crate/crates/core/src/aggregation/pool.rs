use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::ecdf::Ecdf;
use super::index::{dimension_index, DimensionValues};
use super::record::{align_polarity, MetricRecord, Split, TrustDimension};
use crate::error::{AuditError, Result};

/// Which records enter a pool: final rankings use test-split and split-free
/// records; checkpoint selection uses validation-split and split-free ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PoolScope {
    Ranking,
    Selection,
}

impl PoolScope {
    fn admits(self, split: Split) -> bool {
        match self {
            PoolScope::Ranking => split != Split::Val,
            PoolScope::Selection => split != Split::Test,
        }
    }
}

/// One evaluated item: a synthetic dataset from one model, fold and
/// checkpoint.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ItemKey {
    pub dataset_id: String,
    pub model_id: String,
    pub fold_id: usize,
    pub checkpoint_id: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricScore {
    pub metric: String,
    pub dimension: TrustDimension,
    pub raw: Option<f64>,
    pub aligned: Option<f64>,
    /// ECDF-normalized aligned value.
    pub u: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ItemScores {
    pub key: ItemKey,
    /// Sorted by metric name.
    pub metrics: Vec<MetricScore>,
    /// Dimension indices; `None` when the item has no usable metric there.
    pub pi: DimensionValues<f64>,
}

/// Normalizes every metric through the ECDF of its pool (all admitted items'
/// aligned values) and aggregates each dimension by weighted geometric mean.
/// `beta` optionally weights metrics by name (default 1 each).
pub fn score_items(
    records: &[MetricRecord],
    scope: PoolScope,
    beta: Option<&BTreeMap<String, f64>>,
) -> Result<Vec<ItemScores>> {
    let mut items: BTreeMap<ItemKey, BTreeMap<String, &MetricRecord>> = BTreeMap::new();
    for r in records.iter().filter(|r| scope.admits(r.split)) {
        r.validate()?;
        let key = ItemKey {
            dataset_id: r.context.dataset_id.clone(),
            model_id: r.context.model_id.clone(),
            fold_id: r.context.fold_id,
            checkpoint_id: r.context.checkpoint_id,
        };
        if items
            .entry(key.clone())
            .or_default()
            .insert(r.metric.clone(), r)
            .is_some()
        {
            return Err(AuditError::invalid(format!(
                "duplicate record {} for {}/{} fold {} checkpoint {}",
                r.metric, key.dataset_id, key.model_id, key.fold_id, key.checkpoint_id
            )));
        }
    }
    if items.is_empty() {
        return Err(AuditError::invalid("no metric records to aggregate"));
    }
    let names: BTreeSet<String> = items.values().flat_map(|m| m.keys().cloned()).collect();
    let mut pools: BTreeMap<String, Ecdf<f64>> = BTreeMap::new();
    for name in names {
        let values: Vec<f64> = items
            .values()
            .filter_map(|m| m.get(&name).and_then(|r| align_polarity(r)))
            .collect();
        if !values.is_empty() {
            pools.insert(name, Ecdf::new(values)?);
        }
    }

    items
        .into_iter()
        .map(|(key, metrics)| {
            let scores: Vec<MetricScore> = metrics
                .iter()
                .map(|(name, r)| {
                    let aligned = align_polarity(r);
                    MetricScore {
                        metric: name.clone(),
                        dimension: r.dimension,
                        raw: r.value,
                        aligned,
                        u: aligned.map(|a| pools[name].eval(a)),
                    }
                })
                .collect();
            let mut pi: DimensionValues<f64> = [None; 5];
            for dim in TrustDimension::ALL {
                let (u, w): (Vec<Option<f64>>, Vec<f64>) = scores
                    .iter()
                    .filter(|s| s.dimension == dim)
                    .map(|s| (s.u, beta.and_then(|b| b.get(&s.metric)).copied().unwrap_or(1.0)))
                    .unzip();
                if u.iter().any(Option::is_some) {
                    pi[dim.index()] = Some(dimension_index(&u, Some(&w))?);
                }
            }
            Ok(ItemScores {
                key,
                metrics: scores,
                pi,
            })
        })
        .collect()
}

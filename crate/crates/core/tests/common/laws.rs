//! Aggregation laws over randomly generated metric pools.

use proptest::collection::{hash_set, vec};
use proptest::prelude::*;
use synthaudit::aggregation::{preset_profiles, rank_models, summarize_models, RecordContext, Split};
use synthaudit::{MetricRecord, Polarity, TrustDimension, TrustProfile};

/// One registered metric per dimension (two for fidelity and privacy).
pub const METRICS: [(&str, Split); 7] = [
    ("FID", Split::None),
    ("knnPrecision", Split::None),
    ("ReplicatedRows", Split::None),
    ("NNRaw_k1_mean", Split::None),
    ("LR_f1", Split::Test),
    ("LR_EOD", Split::Test),
    ("LR_delta_f1", Split::Test),
];

#[derive(Debug, Clone)]
pub struct Pool {
    pub models: usize,
    pub folds: usize,
    /// `values[(model · folds + fold) · |METRICS| + metric]`
    pub values: Vec<f64>,
}

impl Pool {
    pub fn records(&self, transform: impl Fn(f64) -> f64) -> Vec<MetricRecord> {
        let mut out = Vec::new();
        for m in 0..self.models {
            for f in 0..self.folds {
                for (j, (name, split)) in METRICS.iter().enumerate() {
                    let v = self.values[(m * self.folds + f) * METRICS.len() + j];
                    out.push(MetricRecord::registered(
                        *name,
                        Some(transform(v)),
                        context(m, f),
                        *split,
                    ));
                }
            }
        }
        out
    }
}

fn context(model: usize, fold: usize) -> RecordContext {
    RecordContext {
        dataset_id: "pool".into(),
        model_id: format!("model_{model}"),
        fold_id: fold,
        checkpoint_id: 0,
        classifier_seed: None,
    }
}

/// Coarse value grid so ties occur.
pub fn pools() -> impl Strategy<Value = Pool> {
    (2usize..=6, 1usize..=4).prop_flat_map(|(models, folds)| {
        vec(
            (1u32..=40).prop_map(|v| f64::from(v) / 8.0),
            models * folds * METRICS.len(),
        )
        .prop_map(move |values| Pool { models, folds, values })
    })
}

/// Distinct values of one custom fidelity metric, one per model.
pub fn distinct_scores() -> impl Strategy<Value = Vec<f64>> {
    hash_set(-1000i32..1000, 2..12).prop_map(|s| s.into_iter().map(|v| f64::from(v) / 10.0).collect())
}

pub fn one_hot(dim: TrustDimension) -> TrustProfile {
    let mut w = [0.0; 5];
    w[dim.index()] = 1.0;
    TrustProfile::from_raw(format!("only {dim}"), w).expect("valid profile")
}

fn profiles() -> Vec<TrustProfile> {
    let mut p = preset_profiles();
    p.extend(TrustDimension::ALL.map(one_hot));
    p
}

/// Rankings are unchanged when every raw value goes through a strictly
/// increasing map.
pub fn monotone_invariance(pool: &Pool) -> Result<(), TestCaseError> {
    let base = pool.records(|v| v);
    let warped = pool.records(|v| 3.0 * v.powi(3) + 0.5 * v.ln() + 7.0);
    for alpha in [0.0, 0.5] {
        let a = rank_models(&base, &profiles(), alpha, None).map_err(|e| TestCaseError::fail(e.to_string()))?;
        let b = rank_models(&warped, &profiles(), alpha, None).map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert_eq!(a, b);
    }
    Ok(())
}

/// A one-hot profile's τ equals that dimension's π in every fold.
pub fn one_hot_identity(pool: &Pool) -> Result<(), TestCaseError> {
    let records = pool.records(|v| v);
    for dim in TrustDimension::ALL {
        let ranking = rank_models(&records, &[one_hot(dim)], 0.0, None)
            .map_err(|e| TestCaseError::fail(e.to_string()))?
            .remove(0);
        for e in &ranking.entries {
            for ((f, tau), (g, pi)) in e.tau_per_fold.iter().zip(&e.summary.folds) {
                prop_assert_eq!(f, g);
                prop_assert_eq!(Some(*tau), pi[dim.index()]);
            }
        }
    }
    Ok(())
}

/// Flipping a metric's polarity reverses the order it induces.
pub fn polarity_reversal(scores: &[f64]) -> Result<(), TestCaseError> {
    let records = |polarity| -> Vec<MetricRecord> {
        scores
            .iter()
            .enumerate()
            .map(|(m, &v)| MetricRecord {
                metric: "custom_score".into(),
                dimension: TrustDimension::Fidelity,
                polarity,
                value: Some(v),
                context: context(m, 0),
                split: Split::None,
            })
            .collect()
    };
    let profile = [one_hot(TrustDimension::Fidelity)];
    let order = |p| -> Result<Vec<String>, TestCaseError> {
        let r = rank_models(&records(p), &profile, 0.0, None).map_err(|e| TestCaseError::fail(e.to_string()))?;
        Ok(r[0].model_order().into_iter().map(String::from).collect())
    };
    let up = order(Polarity::Positive)?;
    let mut down = order(Polarity::Negative)?;
    down.reverse();
    prop_assert_eq!(up, down);
    Ok(())
}

fn in_unit(v: f64) -> bool {
    v > 0.0 && v <= 1.0
}

/// Every π and τ lies in (0, 1].
pub fn bounded_indices(pool: &Pool) -> Result<(), TestCaseError> {
    let records = pool.records(|v| v);
    let summaries = summarize_models(&records, None).map_err(|e| TestCaseError::fail(e.to_string()))?;
    for s in &summaries {
        for (_, pi) in &s.folds {
            for v in pi.iter().flatten() {
                prop_assert!(in_unit(*v), "π = {}", v);
            }
        }
    }
    let rankings = rank_models(&records, &profiles(), 0.0, None).map_err(|e| TestCaseError::fail(e.to_string()))?;
    for r in &rankings {
        for e in &r.entries {
            for (_, tau) in &e.tau_per_fold {
                prop_assert!(in_unit(*tau), "τ = {} under {}", tau, r.profile.name);
            }
            prop_assert!(in_unit(e.tau_mean));
        }
    }
    Ok(())
}

/// With α = 0 the ranking is the sort by τ̄ (descending, ties by model id).
pub fn alpha_zero_sorts_by_mean(pool: &Pool) -> Result<(), TestCaseError> {
    let records = pool.records(|v| v);
    let rankings = rank_models(&records, &profiles(), 0.0, None).map_err(|e| TestCaseError::fail(e.to_string()))?;
    for r in &rankings {
        let mut expected: Vec<(f64, &str)> = r
            .entries
            .iter()
            .map(|e| (e.tau_mean, e.summary.model_id.as_str()))
            .collect();
        expected.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(b.1)));
        let expected: Vec<&str> = expected.into_iter().map(|e| e.1).collect();
        prop_assert_eq!(r.model_order(), expected, "profile {}", r.profile.name);
    }
    Ok(())
}

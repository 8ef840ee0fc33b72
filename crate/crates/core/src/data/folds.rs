use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::dataset::TabularDataset;
use crate::error::{AuditError, Result};
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitRatios {
    pub train: f64,
    pub val: f64,
    pub test: f64,
}

impl Default for SplitRatios {
    fn default() -> Self {
        SplitRatios {
            train: 0.8,
            val: 0.1,
            test: 0.1,
        }
    }
}

impl SplitRatios {
    pub fn validate(&self) -> Result<()> {
        let all = [self.train, self.val, self.test];
        if all.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            return Err(AuditError::invalid("split ratios must be positive"));
        }
        if (all.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return Err(AuditError::invalid("split ratios must sum to 1"));
        }
        Ok(())
    }
}

/// One train/validation/test partition of the row indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldSplit {
    pub fold_id: usize,
    pub seed: u64,
    pub train: Vec<usize>,
    pub val: Vec<usize>,
    pub test: Vec<usize>,
}

pub fn split_folds(
    data: &TabularDataset,
    ratios: SplitRatios,
    num_folds: usize,
    base_seed: u64,
) -> Result<Vec<FoldSplit>> {
    split_indices(data.n_rows(), ratios, num_folds, base_seed)
}

/// Each fold shuffles `0..n` with its own derived seed and cuts the
/// permutation into round(n·train), round(n·val) and the remainder.
pub fn split_indices(n: usize, ratios: SplitRatios, num_folds: usize, base_seed: u64) -> Result<Vec<FoldSplit>> {
    ratios.validate()?;
    if num_folds == 0 {
        return Err(AuditError::invalid("num_folds must be at least 1"));
    }
    let n_train = (n as f64 * ratios.train).round() as usize;
    let n_val = (n as f64 * ratios.val).round() as usize;
    if n_train == 0 || n_val == 0 || n_train + n_val >= n {
        return Err(AuditError::invalid(format!(
            "{n} rows cannot be split by {:?} without an empty part",
            ratios
        )));
    }
    Ok((0..num_folds)
        .map(|fold_id| {
            let fold_seed = seed::derive(base_seed, &[seed::tag("fold"), fold_id as u64]);
            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(&mut seed::rng(fold_seed));
            let test = perm.split_off(n_train + n_val);
            let val = perm.split_off(n_train);
            FoldSplit {
                fold_id,
                seed: fold_seed,
                train: perm,
                val,
                test,
            }
        })
        .collect())
}

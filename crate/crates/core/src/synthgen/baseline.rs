use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::copula::GaussianCopulaModel;
use crate::data::{Column, TabularDataset};
use crate::error::{AuditError, Result};
use crate::seed;

fn default_bins() -> usize {
    10
}

/// Reference generators used by audits and the CLI.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GeneratorSpec {
    /// Gaussian copula; with `dp_epsilon`, sampled through the Laplace
    /// output-perturbation sampler over `bins` quantile bins per continuous
    /// column.
    GaussianCopula {
        #[serde(default)]
        dp_epsilon: Option<f64>,
        #[serde(default = "default_bins")]
        bins: usize,
    },
    /// Verbatim copy of the training rows (a memorization worst case).
    Copy,
    /// Each column permuted independently: exact marginals, no dependence.
    ColumnShuffle,
}

impl GeneratorSpec {
    pub fn label(&self) -> &'static str {
        match self {
            GeneratorSpec::GaussianCopula { dp_epsilon: None, .. } => "gaussian_copula",
            GeneratorSpec::GaussianCopula { .. } => "gaussian_copula_dp",
            GeneratorSpec::Copy => "copy",
            GeneratorSpec::ColumnShuffle => "column_shuffle",
        }
    }

    /// Generates `n_rows` rows (default: as many as `train`). Copy and
    /// shuffle cycle through the training rows when more are requested.
    pub fn generate(&self, train: &TabularDataset, n_rows: Option<usize>, seed: u64) -> Result<TabularDataset> {
        let n = n_rows.unwrap_or(train.n_rows());
        if n == 0 {
            return Err(AuditError::invalid("n_rows must be at least 1"));
        }
        match self {
            GeneratorSpec::GaussianCopula { dp_epsilon, bins } => {
                let model = GaussianCopulaModel::fit(train, seed::derive(seed, &[seed::tag("fit")]))?;
                let sample_seed = seed::derive(seed, &[seed::tag("sample")]);
                match dp_epsilon {
                    None => model.sample(n, sample_seed),
                    Some(eps) => model.sample_private(n, *eps, *bins, sample_seed),
                }
            }
            GeneratorSpec::Copy => {
                let rows: Vec<usize> = (0..n).map(|i| i % train.n_rows()).collect();
                Ok(train.select_rows(&rows))
            }
            GeneratorSpec::ColumnShuffle => {
                let rows: Vec<usize> = (0..n).map(|i| i % train.n_rows()).collect();
                let base = train.select_rows(&rows);
                let columns = base
                    .columns()
                    .iter()
                    .enumerate()
                    .map(|(j, col)| {
                        let mut order: Vec<usize> = (0..n).collect();
                        order.shuffle(&mut seed::rng(seed::derive(seed, &[seed::tag("shuffle"), j as u64])));
                        match col {
                            Column::Continuous(v) => Column::Continuous(order.iter().map(|&i| v[i]).collect()),
                            Column::Categorical(v) => {
                                Column::Categorical(order.iter().map(|&i| v[i].clone()).collect())
                            }
                        }
                    })
                    .collect();
                TabularDataset::from_columns(train.schema().clone(), columns, train.origin.clone())
            }
        }
    }
}

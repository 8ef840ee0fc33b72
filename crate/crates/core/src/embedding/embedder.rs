use std::collections::BTreeSet;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::data::{Column, TabularDataset};
use crate::error::{AuditError, Result};
use crate::Matrix;

/// Maps dataset rows to fixed-length real vectors.
pub trait FeatureMap: Send + Sync {
    fn dim(&self) -> usize;
    fn embed(&self, data: &TabularDataset) -> Result<Matrix>;
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum EmbedBlock {
    /// `(x − mean) / std`; `std == 0` marks a constant column emitting 0.
    Numeric { column: usize, mean: f64, std: f64 },
    /// One indicator per observed category; unseen categories give zeros.
    OneHot { column: usize, categories: Vec<String> },
}

impl EmbedBlock {
    fn width(&self) -> usize {
        match self {
            EmbedBlock::Numeric { .. } => 1,
            EmbedBlock::OneHot { categories, .. } => categories.len(),
        }
    }
}

/// Standardize-and-one-hot embedding fit on real training rows. Target and
/// id columns are excluded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Embedder {
    pub blocks: Vec<EmbedBlock>,
    dim: usize,
}

pub fn fit_embedder(real_train: &TabularDataset) -> Result<Embedder> {
    let schema = real_train.schema();
    let target = schema.target_index();
    let mut blocks = Vec::new();
    for j in schema.metric_columns().into_iter().filter(|&j| j != target) {
        blocks.push(match real_train.column(j) {
            Column::Continuous(v) => {
                let n = v.len() as f64;
                let mean = v.iter().sum::<f64>() / n;
                let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
                let std = var.sqrt();
                let std = if std <= 1e-12 * mean.abs().max(1.0) { 0.0 } else { std };
                EmbedBlock::Numeric { column: j, mean, std }
            }
            Column::Categorical(v) => {
                let cats: BTreeSet<&String> = v.iter().collect();
                EmbedBlock::OneHot {
                    column: j,
                    categories: cats.into_iter().cloned().collect(),
                }
            }
        });
    }
    let dim = blocks.iter().map(EmbedBlock::width).sum();
    Ok(Embedder { blocks, dim })
}

impl Embedder {
    pub fn fit(real_train: &TabularDataset) -> Result<Self> {
        fit_embedder(real_train)
    }

    /// Feature offset of each block.
    pub fn offsets(&self) -> Vec<usize> {
        self.blocks
            .iter()
            .scan(0, |acc, b| {
                let o = *acc;
                *acc += b.width();
                Some(o)
            })
            .collect()
    }
}

impl FeatureMap for Embedder {
    fn dim(&self) -> usize {
        self.dim
    }

    fn embed(&self, data: &TabularDataset) -> Result<Matrix> {
        let n = data.n_rows();
        let mut out = Array2::zeros((n, self.dim));
        for (block, offset) in self.blocks.iter().zip(self.offsets()) {
            match block {
                EmbedBlock::Numeric { column, mean, std } => {
                    let v = data
                        .column(*column)
                        .as_continuous()
                        .ok_or_else(|| AuditError::Schema("embedder column kind changed".into()))?;
                    if *std > 0.0 {
                        for i in 0..n {
                            out[[i, offset]] = (v[i] - mean) / std;
                        }
                    }
                }
                EmbedBlock::OneHot { column, categories } => {
                    let v = data
                        .column(*column)
                        .as_categorical()
                        .ok_or_else(|| AuditError::Schema("embedder column kind changed".into()))?;
                    for i in 0..n {
                        if let Ok(k) = categories.binary_search(&v[i]) {
                            out[[i, offset + k]] = 1.0;
                        }
                    }
                }
            }
        }
        Ok(out)
    }
}

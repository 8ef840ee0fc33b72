use ndarray::ArrayView2;
use serde::{Deserialize, Serialize};

use super::knn::KnnClassifier;
use super::logistic::{train_logistic_regression, LogisticSpec};
use super::mlp::{train_mlp, MlpSpec};
use crate::error::{AuditError, Result};
use crate::Scalar;

/// A trained binary classifier over embedded feature rows.
pub trait Classifier<S: Scalar>: Send + Sync {
    /// Probability of the positive class for every row.
    fn predict_proba(&self, x: ArrayView2<S>) -> Vec<S>;

    /// Positive iff the probability is at least ½.
    fn predict(&self, x: ArrayView2<S>) -> Vec<u8> {
        self.predict_proba(x)
            .into_iter()
            .map(|p| u8::from(p >= S::lit(0.5)))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ClassifierSpec {
    LogisticRegression(LogisticSpec),
    Knn { k: usize },
    Mlp(MlpSpec),
}

impl ClassifierSpec {
    /// Short name used in metric names.
    pub fn label(&self) -> &'static str {
        match self {
            ClassifierSpec::LogisticRegression(_) => "LR",
            ClassifierSpec::Knn { .. } => "KNN",
            ClassifierSpec::Mlp(_) => "MLP",
        }
    }
}

pub(crate) fn check_labels(y: &[u8], rows: usize) -> Result<()> {
    if y.len() != rows {
        return Err(AuditError::DimensionMismatch {
            expected: rows,
            got: y.len(),
        });
    }
    if y.iter().any(|&v| v > 1) {
        return Err(AuditError::invalid("labels must be 0 or 1"));
    }
    if !(y.contains(&0) && y.contains(&1)) {
        return Err(AuditError::SingleClass);
    }
    Ok(())
}

/// Trains the classifier described by `spec`. The validation rows are only
/// used by the MLP for early stopping.
pub fn train_classifier<S: Scalar>(
    spec: &ClassifierSpec,
    x: ArrayView2<S>,
    y: &[u8],
    val_x: ArrayView2<S>,
    val_y: &[u8],
) -> Result<Box<dyn Classifier<S>>> {
    Ok(match spec {
        ClassifierSpec::LogisticRegression(s) => Box::new(train_logistic_regression(x, y, s)?),
        ClassifierSpec::Knn { k } => {
            check_labels(y, x.nrows())?;
            Box::new(KnnClassifier::new(x.to_owned(), y.to_vec(), *k)?)
        }
        ClassifierSpec::Mlp(s) => Box::new(train_mlp(x, y, val_x, val_y, s)?),
    })
}

/// Predictions on evaluation rows together with their ground truth and
/// protected-group membership.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionSet {
    pub predicted: Vec<u8>,
    pub truth: Vec<u8>,
    /// True for rows in the privileged group.
    pub privileged: Vec<bool>,
}

impl PredictionSet {
    pub fn new(predicted: Vec<u8>, truth: Vec<u8>, privileged: Vec<bool>) -> Result<Self> {
        if predicted.len() != truth.len() || truth.len() != privileged.len() {
            return Err(AuditError::DimensionMismatch {
                expected: truth.len(),
                got: predicted.len().max(privileged.len()),
            });
        }
        Ok(PredictionSet {
            predicted,
            truth,
            privileged,
        })
    }

    pub fn len(&self) -> usize {
        self.truth.len()
    }

    pub fn is_empty(&self) -> bool {
        self.truth.is_empty()
    }
}

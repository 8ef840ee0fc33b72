use ndarray::{Array2, ArrayView2};

use super::classifier::Classifier;
use crate::error::{AuditError, Result};
use crate::neighbors::{k_nearest, Euclidean, KnnConfig};
use crate::Scalar;

/// Euclidean nearest-neighbour classifier; distance ties go to the lower
/// training index. The probability is the positive fraction among the `k`
/// neighbours.
#[derive(Debug, Clone)]
pub struct KnnClassifier<S: Scalar> {
    points: Array2<S>,
    labels: Vec<u8>,
    k: usize,
}

impl<S: Scalar> KnnClassifier<S> {
    pub fn new(points: Array2<S>, labels: Vec<u8>, k: usize) -> Result<Self> {
        if points.nrows() == 0 {
            return Err(AuditError::TooFewRows {
                what: "kNN classifier",
                need: 1,
                got: 0,
            });
        }
        if labels.len() != points.nrows() {
            return Err(AuditError::DimensionMismatch {
                expected: points.nrows(),
                got: labels.len(),
            });
        }
        if k == 0 {
            return Err(AuditError::invalid("k must be at least 1"));
        }
        Ok(KnnClassifier { points, labels, k })
    }
}

impl<S: Scalar> Classifier<S> for KnnClassifier<S> {
    fn predict_proba(&self, x: ArrayView2<S>) -> Vec<S> {
        k_nearest(self.points.view(), x, self.k, false, &Euclidean, &KnnConfig::default())
            .into_iter()
            .map(|nn| {
                let pos = nn.iter().filter(|n| self.labels[n.index] == 1).count();
                S::from_usize_lossy(pos) / S::from_usize_lossy(nn.len())
            })
            .collect()
    }
}

/// Labels of the nearest training row (k = 1) for every query row.
pub fn knn_classify<S: Scalar>(train: ArrayView2<S>, labels: &[u8], query: ArrayView2<S>) -> Result<Vec<u8>> {
    Ok(KnnClassifier::new(train.to_owned(), labels.to_vec(), 1)?.predict(query))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn exact_match_and_tie_rule() {
        let train = array![[0.0, 0.0], [2.0, 0.0], [5.0, 5.0]];
        let labels = [1u8, 0, 1];
        assert_eq!(
            knn_classify(train.view(), &labels, array![[5.0, 5.0]].view()).unwrap(),
            vec![1]
        );
        assert_eq!(
            knn_classify(train.view(), &labels, array![[1.0, 0.0]].view()).unwrap(),
            vec![1]
        );
    }

    #[test]
    fn matches_exhaustive_search() {
        let train = Array2::from_shape_fn((60, 3), |(i, j)| ((i * 17 + j * 29) % 31) as f64);
        let labels: Vec<u8> = (0..60).map(|i| (i % 3 == 0) as u8).collect();
        let query = Array2::from_shape_fn((40, 3), |(i, j)| ((i * 11 + j * 7) % 29) as f64 + 0.25);
        let got = knn_classify(train.view(), &labels, query.view()).unwrap();
        for (qi, q) in query.rows().into_iter().enumerate() {
            let mut best = (f64::INFINITY, 0);
            for (i, r) in train.rows().into_iter().enumerate() {
                let d = (&q - &r).mapv(|v| v * v).sum();
                if d < best.0 {
                    best = (d, i);
                }
            }
            assert_eq!(got[qi], labels[best.1]);
        }
    }
}

use ndarray::ArrayView2;
use rayon::prelude::*;

use crate::error::{AuditError, Result};
use crate::neighbors::{k_nearest, Distance, Euclidean, KnnConfig};
use crate::Scalar;

/// Distance from each point to its k-th nearest neighbour within its own
/// set, excluding itself.
fn radii<S: Scalar>(points: ArrayView2<S>, k: usize) -> Vec<S> {
    k_nearest(points, points, k, true, &Euclidean, &KnnConfig::default())
        .into_iter()
        .map(|nn| nn[k - 1].dist)
        .collect()
}

/// Fraction of `queries` that fall inside the kNN ball of some reference
/// point.
fn coverage<S: Scalar>(queries: ArrayView2<S>, reference: ArrayView2<S>, radii: &[S]) -> S {
    let reference = reference.as_standard_layout();
    let queries = queries.as_standard_layout();
    let hits = (0..queries.nrows())
        .into_par_iter()
        .filter(|&i| {
            let q = queries.row(i);
            let q = q.as_slice().expect("standard layout");
            reference
                .rows()
                .into_iter()
                .zip(radii)
                .any(|(r, &rad)| Euclidean.dist(r.as_slice().expect("standard layout"), q) <= rad)
        })
        .count();
    S::from_usize_lossy(hits) / S::from_usize_lossy(queries.nrows())
}

/// kNN-manifold precision (synthetic rows covered by real kNN balls) and
/// recall (real rows covered by synthetic kNN balls).
pub fn knn_precision_recall<S: Scalar>(phi_r: ArrayView2<S>, phi_s: ArrayView2<S>, k: usize) -> Result<(S, S)> {
    if k == 0 {
        return Err(AuditError::invalid("k must be at least 1"));
    }
    for n in [phi_r.nrows(), phi_s.nrows()] {
        if n <= k {
            return Err(AuditError::TooFewRows {
                what: "kNN precision/recall",
                need: k + 1,
                got: n,
            });
        }
    }
    let rr = radii(phi_r, k);
    let rs = radii(phi_s, k);
    Ok((coverage(phi_s, phi_r, &rr), coverage(phi_r, phi_s, &rs)))
}

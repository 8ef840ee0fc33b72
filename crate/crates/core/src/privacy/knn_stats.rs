use ndarray::ArrayView2;
use num_traits::ToPrimitive;

use crate::error::{AuditError, Result};
use crate::neighbors::{k_nearest, Distance, KnnConfig};
use crate::Scalar;

/// Neighbour counts used for privacy distances.
pub const PRIVACY_KS: [usize; 3] = [1, 3, 5];

const MODE_BINS: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceStats<S> {
    pub k: usize,
    pub mean: S,
    pub median: S,
    /// Midpoint of the most populated of 32 equal-width bins (lowest bin on
    /// ties).
    pub mode: S,
    /// Population standard deviation.
    pub std: S,
}

fn median_sorted<S: Scalar>(v: &[S]) -> S {
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / S::lit(2.0)
    }
}

fn summarize<S: Scalar>(k: usize, mut d: Vec<S>) -> DistanceStats<S> {
    d.sort_by(|a, b| a.partial_cmp(b).expect("finite distances"));
    let n = S::from_usize_lossy(d.len());
    let mean = d.iter().copied().sum::<S>() / n;
    let std = (d.iter().map(|&x| (x - mean) * (x - mean)).sum::<S>() / n).sqrt();
    let (lo, hi) = (d[0], d[d.len() - 1]);
    let mode = if hi == lo {
        lo
    } else {
        let width = (hi - lo) / S::from_usize_lossy(MODE_BINS);
        let mut counts = [0usize; MODE_BINS];
        for &x in &d {
            let b = ((x - lo) / width).floor().to_real() as usize;
            counts[b.min(MODE_BINS - 1)] += 1;
        }
        let best = (0..MODE_BINS).fold(0, |best, b| if counts[b] > counts[best] { b } else { best });
        lo + width * (S::from_usize_lossy(best) + S::lit(0.5))
    };
    DistanceStats {
        k,
        mean,
        median: median_sorted(&d),
        mode,
        std,
    }
}

/// For each query row, the distance for `k` is the median of its `k` nearest
/// reference distances (so the 1-NN distance for `k = 1`); statistics are
/// taken over query rows.
pub fn knn_distance_stats<T, M, S>(
    reference: ArrayView2<T>,
    query: ArrayView2<T>,
    ks: &[usize],
    metric: &M,
    cfg: &KnnConfig,
) -> Result<Vec<DistanceStats<S>>>
where
    T: Copy + Send + Sync,
    M: Distance<T>,
    S: Scalar,
{
    let kmax = ks.iter().copied().max().unwrap_or(0);
    if kmax == 0 || ks.contains(&0) {
        return Err(AuditError::invalid("neighbour counts must be positive"));
    }
    if reference.nrows() < kmax {
        return Err(AuditError::TooFewRows {
            what: "kNN privacy distances",
            need: kmax,
            got: reference.nrows(),
        });
    }
    if query.nrows() == 0 {
        return Err(AuditError::TooFewRows {
            what: "kNN privacy queries",
            need: 1,
            got: 0,
        });
    }
    let nn = k_nearest(reference, query, kmax, false, metric, cfg);
    Ok(ks
        .iter()
        .map(|&k| {
            let per_query: Vec<S> = nn
                .iter()
                .map(|list| {
                    let d: Vec<S> = list[..k]
                        .iter()
                        .map(|n| S::lit(n.dist.to_f64().expect("distance converts")))
                        .collect();
                    median_sorted(&d)
                })
                .collect();
            summarize(k, per_query)
        })
        .collect())
}

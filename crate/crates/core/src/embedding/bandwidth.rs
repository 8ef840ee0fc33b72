use ndarray::ArrayView2;
use rand::seq::index::sample;

use crate::error::{AuditError, Result};
use crate::{seed, Scalar};

/// Median pairwise Euclidean distance over at most `subsample` rows (chosen
/// without replacement with `seed`), clamped below at 1e-12.
pub fn median_heuristic_bandwidth<S: Scalar>(x: ArrayView2<S>, subsample: usize, seed: u64) -> Result<S> {
    let n = x.nrows();
    if n < 2 {
        return Err(AuditError::TooFewRows {
            what: "bandwidth heuristic",
            need: 2,
            got: n,
        });
    }
    let rows: Vec<usize> = if subsample >= n {
        (0..n).collect()
    } else {
        let mut idx = sample(&mut seed::rng(seed), n, subsample.max(2)).into_vec();
        idx.sort_unstable();
        idx
    };
    let mut dists = Vec::with_capacity(rows.len() * (rows.len() - 1) / 2);
    for (a, &i) in rows.iter().enumerate() {
        for &j in &rows[a + 1..] {
            let d2: S = x.row(i).iter().zip(x.row(j)).map(|(&p, &q)| (p - q) * (p - q)).sum();
            dists.push(d2.sqrt());
        }
    }
    dists.sort_by(|a, b| a.partial_cmp(b).expect("finite distances"));
    let m = dists.len();
    let median = if m % 2 == 1 {
        dists[m / 2]
    } else {
        (dists[m / 2 - 1] + dists[m / 2]) / S::lit(2.0)
    };
    Ok(median.max(S::lit(1e-12)))
}

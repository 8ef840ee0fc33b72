use std::collections::BTreeMap;

use ndarray::ArrayView2;

use crate::error::{AuditError, Result};
use crate::Scalar;

/// One-way ANOVA F statistic of every column grouped by `labels`.
/// Zero within-group variance gives +∞ when groups differ and 0 otherwise.
pub fn anova_f_scores<S: Scalar>(x: ArrayView2<S>, labels: &[u8]) -> Result<Vec<S>> {
    if labels.len() != x.nrows() {
        return Err(AuditError::DimensionMismatch {
            expected: x.nrows(),
            got: labels.len(),
        });
    }
    let mut groups: BTreeMap<u8, Vec<usize>> = BTreeMap::new();
    for (i, &l) in labels.iter().enumerate() {
        groups.entry(l).or_default().push(i);
    }
    let g = groups.len();
    let n = labels.len();
    if g < 2 {
        return Err(AuditError::SingleClass);
    }
    let dfb = S::from_usize_lossy(g - 1);
    let dfw = S::from_usize_lossy(n.saturating_sub(g).max(1));
    Ok((0..x.ncols())
        .map(|j| {
            let col = x.column(j);
            let grand = col.iter().copied().sum::<S>() / S::from_usize_lossy(n);
            let mut ssb = S::zero();
            let mut ssw = S::zero();
            for rows in groups.values() {
                let k = S::from_usize_lossy(rows.len());
                let mean = rows.iter().map(|&i| col[i]).sum::<S>() / k;
                ssb += k * (mean - grand) * (mean - grand);
                ssw += rows.iter().map(|&i| (col[i] - mean) * (col[i] - mean)).sum::<S>();
            }
            let tiny = S::lit(1e-12) * (ssb + ssw);
            if ssw <= tiny {
                if ssb > S::zero() {
                    S::max_value().expect("real field has a max")
                } else {
                    S::zero()
                }
            } else {
                (ssb / dfb) / (ssw / dfw)
            }
        })
        .collect())
}

/// Indices of the `min(k, d)` columns with the largest F statistic, in rank
/// order; ties go to the lower index.
pub fn anova_f_select<S: Scalar>(x: ArrayView2<S>, labels: &[u8], k: usize) -> Result<Vec<usize>> {
    if k == 0 {
        return Err(AuditError::invalid("k must be at least 1"));
    }
    let f = anova_f_scores(x, labels)?;
    let mut idx: Vec<usize> = (0..f.len()).collect();
    idx.sort_by(|&a, &b| f[b].partial_cmp(&f[a]).expect("finite F").then(a.cmp(&b)));
    idx.truncate(k.min(f.len()));
    Ok(idx)
}

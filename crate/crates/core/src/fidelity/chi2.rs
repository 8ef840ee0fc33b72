use ndarray::ArrayView2;

use crate::error::{AuditError, Result};
use crate::Scalar;

fn frequencies<S: Scalar>(tokens: ArrayView2<u32>, field: usize, vocab: usize) -> Result<Vec<S>> {
    let mut counts = vec![0usize; vocab];
    for &t in tokens.column(field) {
        *counts.get_mut(t as usize).ok_or(AuditError::DimensionMismatch {
            expected: vocab,
            got: t as usize + 1,
        })? += 1;
    }
    let n = S::from_usize_lossy(tokens.nrows().max(1));
    Ok(counts.into_iter().map(|c| S::from_usize_lossy(c) / n).collect())
}

/// `½ Σ (r_i − s_i)² / (r_i + s_i)` over the token frequencies of one field;
/// tokens absent from both sides contribute 0.
pub fn chi_squared_per_field<S: Scalar>(
    real: ArrayView2<u32>,
    synth: ArrayView2<u32>,
    field: usize,
    vocab: usize,
) -> Result<S> {
    if vocab == 0 {
        return Err(AuditError::invalid("empty field vocabulary"));
    }
    let r = frequencies::<S>(real, field, vocab)?;
    let s = frequencies::<S>(synth, field, vocab)?;
    let total = r
        .iter()
        .zip(&s)
        .filter(|(a, b)| **a + **b > S::zero())
        .map(|(&a, &b)| (a - b) * (a - b) / (a + b))
        .sum::<S>();
    Ok(total / S::lit(2.0))
}

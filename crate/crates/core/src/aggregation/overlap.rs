use std::collections::BTreeSet;

use crate::error::{AuditError, Result};

/// Jaccard overlap `|A ∩ B| / |A ∪ B|` of the top-`k` entries of two ranked
/// lists.
pub fn overlap_at_k<T: Ord>(a: &[T], b: &[T], k: usize) -> Result<f64> {
    if k == 0 {
        return Err(AuditError::invalid("overlap needs k ≥ 1"));
    }
    if k > a.len() || k > b.len() {
        return Err(AuditError::invalid(format!(
            "k = {k} exceeds list lengths {} and {}",
            a.len(),
            b.len()
        )));
    }
    let ta: BTreeSet<&T> = a[..k].iter().collect();
    let tb: BTreeSet<&T> = b[..k].iter().collect();
    if ta.len() != k || tb.len() != k {
        return Err(AuditError::invalid("ranked lists must hold distinct ids"));
    }
    let inter = ta.intersection(&tb).count();
    let union = ta.union(&tb).count();
    Ok(inter as f64 / union as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert_eq!(overlap_at_k(&["a", "b", "c"], &["a", "c", "d"], 3).unwrap(), 0.5);
        assert_eq!(overlap_at_k(&["a", "b"], &["a", "b"], 1).unwrap(), 1.0);
        assert_eq!(overlap_at_k(&["a", "b"], &["c", "d"], 2).unwrap(), 0.0);
        assert!(overlap_at_k(&["a"], &["a", "b"], 2).is_err());
        assert!(overlap_at_k(&["a", "a"], &["a", "b"], 2).is_err());
    }
}

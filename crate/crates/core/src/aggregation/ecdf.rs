use crate::error::{AuditError, Result};
use crate::Scalar;

/// Empirical CDF of a pool of aligned metric values.
#[derive(Debug, Clone, PartialEq)]
pub struct Ecdf<S> {
    sorted: Vec<S>,
}

impl<S: Scalar> Ecdf<S> {
    pub fn new(mut pool: Vec<S>) -> Result<Self> {
        if pool.is_empty() {
            return Err(AuditError::invalid("ECDF pool is empty"));
        }
        pool.sort_by(|a, b| a.partial_cmp(b).expect("finite pool values"));
        Ok(Ecdf { sorted: pool })
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    /// Lower clamp `1 / (2·|pool|)`, only reachable for values below the pool.
    pub fn floor(&self) -> S {
        S::one() / S::from_usize_lossy(2 * self.sorted.len())
    }

    /// `#{pool ≤ x} / |pool|`, clamped below at [`Ecdf::floor`].
    pub fn eval(&self, x: S) -> S {
        let count = self.sorted.partition_point(|&v| v <= x);
        (S::from_usize_lossy(count) / S::from_usize_lossy(self.sorted.len())).max(self.floor())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn counting_and_clamping() {
        let e = Ecdf::new(vec![0.3, 0.1, 0.2]).unwrap();
        assert_eq!(e.eval(0.2), 2.0 / 3.0);
        assert_eq!(e.eval(0.0), 1.0 / 6.0);
        assert_eq!(e.eval(0.3), 1.0);
        assert!(Ecdf::<f64>::new(vec![]).is_err());
    }

    proptest! {
        #[test]
        fn pool_members_are_never_clamped(pool in prop::collection::vec(-100.0f64..100.0, 1..40)) {
            let e = Ecdf::new(pool.clone()).unwrap();
            for &x in &pool {
                prop_assert!(e.eval(x) >= 1.0 / pool.len() as f64);
            }
        }

        #[test]
        fn monotone(pool in prop::collection::vec(-10.0f64..10.0, 1..30), a in -12.0f64..12.0, b in -12.0f64..12.0) {
            let e = Ecdf::new(pool).unwrap();
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(e.eval(lo) <= e.eval(hi));
        }
    }
}

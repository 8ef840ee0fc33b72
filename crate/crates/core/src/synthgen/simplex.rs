/// Euclidean projection onto the probability simplex `{p ≥ 0, Σp = 1}`
/// (sorted-threshold algorithm).
pub fn project_to_simplex(v: &[f64]) -> Vec<f64> {
    if v.is_empty() {
        return Vec::new();
    }
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        cumsum += x;
        let t = (cumsum - 1.0) / (i + 1) as f64;
        if x - t > 0.0 {
            theta = t;
        }
    }
    let mut p: Vec<f64> = v.iter().map(|&x| (x - theta).max(0.0)).collect();
    // absorb rounding so the result sums to one
    let total: f64 = p.iter().sum();
    if total > 0.0 {
        p.iter_mut().for_each(|x| *x /= total);
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// The projection is the unique `p = max(v − θ, 0)` whose support `S`
    /// satisfies `θ = (Σ_S v − 1)/|S|`, `v_i > θ` on `S` and `v_i ≤ θ` off it.
    fn kkt_oracle(v: &[f64]) -> Vec<f64> {
        let n = v.len();
        for mask in 1u32..(1 << n) {
            let members: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
            let theta = (members.iter().map(|&i| v[i]).sum::<f64>() - 1.0) / members.len() as f64;
            let ok = (0..n).all(|i| {
                if mask & (1 << i) != 0 {
                    v[i] > theta
                } else {
                    v[i] <= theta
                }
            });
            if ok {
                return v.iter().map(|&x| (x - theta).max(0.0)).collect();
            }
        }
        unreachable!("a valid support always exists")
    }

    #[test]
    fn examples() {
        let p = project_to_simplex(&[1.2, -0.1, 0.3]);
        for (a, b) in p.iter().zip([0.95, 0.0, 0.05]) {
            assert!((a - b).abs() < 1e-12, "{p:?}");
        }
        assert_eq!(project_to_simplex(&[0.25, 0.75]), vec![0.25, 0.75]);
    }

    proptest! {
        #[test]
        fn matches_kkt_oracle(v in prop::collection::vec(-3.0f64..3.0, 1..=10)) {
            let p = project_to_simplex(&v);
            let q = kkt_oracle(&v);
            prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            for (a, b) in p.iter().zip(&q) {
                prop_assert!(*a >= 0.0);
                prop_assert!((a - b).abs() < 1e-12, "{:?} vs {:?}", p, q);
            }
        }
    }
}

use ndarray::{Array2, ArrayView2};

use crate::Scalar;

/// Sorted-run counts of the joint keys of two token columns.
fn joint_counts(a: ndarray::ArrayView1<u32>, b: ndarray::ArrayView1<u32>) -> Vec<((u32, u32), usize)> {
    let mut keys: Vec<(u32, u32)> = a.iter().copied().zip(b.iter().copied()).collect();
    keys.sort_unstable();
    let mut out: Vec<((u32, u32), usize)> = Vec::new();
    for k in keys {
        match out.last_mut() {
            Some((last, c)) if *last == k => *c += 1,
            _ => out.push((k, 1)),
        }
    }
    out
}

fn marginal(col: ndarray::ArrayView1<u32>) -> std::collections::HashMap<u32, usize> {
    let mut m = std::collections::HashMap::new();
    for &t in col {
        *m.entry(t).or_insert(0) += 1;
    }
    m
}

/// Plug-in mutual information (natural log) between every pair of token
/// columns; the diagonal holds each column's empirical entropy.
pub fn mutual_information_matrix<S: Scalar>(tokens: ArrayView2<u32>) -> Array2<S> {
    let f = tokens.ncols();
    let n = tokens.nrows();
    let mut out = Array2::from_elem((f, f), S::zero());
    if n == 0 {
        return out;
    }
    let nf = S::from_usize_lossy(n);
    let marginals: Vec<_> = (0..f).map(|j| marginal(tokens.column(j))).collect();
    for i in 0..f {
        for j in i..f {
            let mut mi = S::zero();
            for ((a, b), c) in joint_counts(tokens.column(i), tokens.column(j)) {
                let pab = S::from_usize_lossy(c) / nf;
                let pa = S::from_usize_lossy(marginals[i][&a]) / nf;
                let pb = S::from_usize_lossy(marginals[j][&b]) / nf;
                mi += pab * (pab / (pa * pb)).ln();
            }
            out[[i, j]] = mi;
            out[[j, i]] = mi;
        }
    }
    out
}

/// Frobenius norm of the difference between the two MI matrices.
pub fn mi_l2_difference<S: Scalar>(real: ArrayView2<u32>, synth: ArrayView2<u32>) -> S {
    let a = mutual_information_matrix::<S>(real);
    let b = mutual_information_matrix::<S>(synth);
    a.iter()
        .zip(b.iter())
        .map(|(&x, &y)| (x - y) * (x - y))
        .sum::<S>()
        .sqrt()
}

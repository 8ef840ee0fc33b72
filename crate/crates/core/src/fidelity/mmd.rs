use nalgebra::{DMatrix, DVector};
use ndarray::{Array1, Array2, ArrayView2, Axis};
use rand::seq::SliceRandom;

use crate::embedding::RffMap;
use crate::error::{AuditError, Result};
use crate::{seed, Scalar};

const MIN_ROWS: usize = 8;
const SHRINKAGE: f64 = 1e-6;

/// Result of fitting a linear witness in random-Fourier-feature space.
#[derive(Debug, Clone, PartialEq)]
pub struct MmdWitness<S> {
    pub train_snr: S,
    pub test_snr: S,
    /// Witness values of the held-out real rows.
    pub test_real: Vec<S>,
    /// Witness values of the held-out synthetic rows.
    pub test_synth: Vec<S>,
}

/// Seeded permutation of `0..n` cut into `⌊n/2⌋` train and the rest test.
/// Depends only on `(n, seed)`.
pub fn split_halves(n: usize, split_seed: u64) -> (Vec<usize>, Vec<usize>) {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut seed::rng(seed::derive(
        split_seed,
        &[seed::tag("halves"), n as u64],
    )));
    let test = perm.split_off(n / 2);
    (perm, test)
}

fn mean_var<S: Scalar>(v: &[S]) -> (S, S) {
    let n = S::from_usize_lossy(v.len());
    let mean = v.iter().copied().sum::<S>() / n;
    let ss = v.iter().map(|&x| (x - mean) * (x - mean)).sum::<S>();
    (mean, ss)
}

/// `|mean(a) − mean(b)| / pooled std`, with the pooled variance
/// `(SS_a + SS_b) / (n_a + n_b − 2)`. Zero when the means agree.
pub fn snr<S: Scalar>(a: &[S], b: &[S]) -> S {
    let (ma, ssa) = mean_var(a);
    let (mb, ssb) = mean_var(b);
    let gap = (ma - mb).abs();
    if gap == S::zero() {
        return S::zero();
    }
    let dof = S::from_usize_lossy((a.len() + b.len()).saturating_sub(2).max(1));
    let std = ((ssa + ssb) / dof).sqrt().max(S::lit(1e-12));
    gap / std
}

fn centered_scatter<S: Scalar>(z: &Array2<S>) -> (Array1<S>, Array2<S>) {
    let mean = z.mean_axis(Axis(0)).expect("nonempty");
    let c = z - &mean.view().insert_axis(Axis(0));
    let scatter = c.t().dot(&c);
    (mean, scatter)
}

/// Fits a Fisher discriminant witness on the train halves of both sets (in
/// RFF space) and reports its signal-to-noise ratio on train and on the
/// held-out halves.
pub fn mmd_witness_snr<S: Scalar>(
    phi_r: ArrayView2<S>,
    phi_s: ArrayView2<S>,
    rff: &RffMap<S>,
    split_seed: u64,
) -> Result<MmdWitness<S>> {
    for (what, n) in [("MMD real set", phi_r.nrows()), ("MMD synthetic set", phi_s.nrows())] {
        if n < MIN_ROWS {
            return Err(AuditError::TooFewRows {
                what,
                need: MIN_ROWS,
                got: n,
            });
        }
    }
    let zr = rff.transform(phi_r)?;
    let zs = rff.transform(phi_s)?;
    let (tr_r, te_r) = split_halves(zr.nrows(), split_seed);
    let (tr_s, te_s) = split_halves(zs.nrows(), split_seed);
    let train_r = zr.select(Axis(0), &tr_r);
    let train_s = zs.select(Axis(0), &tr_s);

    let (mu_r, sc_r) = centered_scatter(&train_r);
    let (mu_s, sc_s) = centered_scatter(&train_s);
    let m = zr.ncols();
    let dof = S::from_usize_lossy(train_r.nrows() + train_s.nrows() - 2);
    let pooled = (sc_r + sc_s) / dof;
    let cov = DMatrix::from_fn(m, m, |i, j| {
        pooled[[i, j]] + if i == j { S::lit(SHRINKAGE) } else { S::zero() }
    });
    let delta = DVector::from_fn(m, |i, _| mu_r[i] - mu_s[i]);
    let w = cov
        .cholesky()
        .ok_or_else(|| AuditError::Numerical("witness covariance is not positive definite".into()))?
        .solve(&delta);
    let w = Array1::from_iter(w.iter().copied());

    let project = |z: &Array2<S>, rows: &[usize]| -> Vec<S> { rows.iter().map(|&i| z.row(i).dot(&w)).collect() };
    let train_snr = snr(&project(&zr, &tr_r), &project(&zs, &tr_s));
    let test_real = project(&zr, &te_r);
    let test_synth = project(&zs, &te_s);
    Ok(MmdWitness {
        train_snr,
        test_snr: snr(&test_real, &test_synth),
        test_real,
        test_synth,
    })
}

/// `(1 + #{permuted SNR ≥ observed}) / (1 + permutations)`, reshuffling the
/// labels of the pooled held-out witness values.
pub fn mmd_permutation_pvalue<S: Scalar>(real: &[S], synth: &[S], permutations: usize, seed: u64) -> Result<S> {
    if permutations == 0 {
        return Err(AuditError::invalid("permutation count must be at least 1"));
    }
    if real.is_empty() || synth.is_empty() {
        return Err(AuditError::invalid("permutation test needs values on both sides"));
    }
    let observed = snr(real, synth);
    let mut pooled: Vec<S> = real.iter().chain(synth).copied().collect();
    let mut rng = seed::rng(seed);
    let mut hits = 0usize;
    for _ in 0..permutations {
        pooled.shuffle(&mut rng);
        let (a, b) = pooled.split_at(real.len());
        if snr(a, b) >= observed {
            hits += 1;
        }
    }
    Ok(S::from_usize_lossy(1 + hits) / S::from_usize_lossy(1 + permutations))
}

use nalgebra::{DMatrix, DVector};
use ndarray::ArrayView2;

use crate::error::{AuditError, Result};
use crate::Scalar;

const SHRINKAGE: f64 = 1e-6;

fn moments<S: Scalar>(x: ArrayView2<S>) -> (DVector<S>, DMatrix<S>) {
    let n = x.nrows();
    let d = x.ncols();
    let m = DMatrix::from_fn(n, d, |i, j| x[[i, j]]);
    let mean = DVector::from_fn(d, |j, _| m.column(j).sum() / S::from_usize_lossy(n));
    let mut centered = m;
    for j in 0..d {
        let mu = mean[j];
        centered.column_mut(j).apply(|v| *v -= mu);
    }
    let mut cov = centered.transpose() * &centered / S::from_usize_lossy(n - 1);
    for i in 0..d {
        cov[(i, i)] += S::lit(SHRINKAGE);
    }
    (mean, cov)
}

fn symmetric_sqrt<S: Scalar>(a: DMatrix<S>) -> DMatrix<S> {
    let eig = a.symmetric_eigen();
    let roots = eig.eigenvalues.map(|l| l.max(S::zero()).sqrt());
    &eig.eigenvectors * DMatrix::from_diagonal(&roots) * eig.eigenvectors.transpose()
}

/// Fréchet distance between Gaussians fit to the two sets:
/// `‖μ_r − μ_s‖² + tr(Σ_r + Σ_s − 2(Σ_r^{½} Σ_s Σ_r^{½})^{½})`.
pub fn frechet_distance<S: Scalar>(phi_r: ArrayView2<S>, phi_s: ArrayView2<S>) -> Result<S> {
    for n in [phi_r.nrows(), phi_s.nrows()] {
        if n < 2 {
            return Err(AuditError::TooFewRows {
                what: "Fréchet distance",
                need: 2,
                got: n,
            });
        }
    }
    if phi_r.ncols() != phi_s.ncols() {
        return Err(AuditError::DimensionMismatch {
            expected: phi_r.ncols(),
            got: phi_s.ncols(),
        });
    }
    let (mu_r, cov_r) = moments(phi_r);
    let (mu_s, cov_s) = moments(phi_s);
    let root_r = symmetric_sqrt(cov_r.clone());
    let inner = &root_r * &cov_s * &root_r;
    let inner = (&inner + inner.transpose()) * S::lit(0.5);
    let cross: S = inner
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .map(|&l| l.max(S::zero()).sqrt())
        .sum();
    let gap = (&mu_r - &mu_s).norm_squared();
    Ok((gap + cov_r.trace() + cov_s.trace() - S::lit(2.0) * cross).max(S::zero()))
}

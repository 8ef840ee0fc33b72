use ndarray::{Array1, Array2, ArrayView2, Axis};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{AuditError, Result};
use crate::{seed, Scalar};

/// Random Fourier features approximating the Gaussian kernel
/// `exp(−‖x−y‖² / (2σ²))`: `x ↦ sqrt(2/m)·cos(xW + b)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RffMap<S: Scalar> {
    /// `d × m` frequencies drawn from N(0, 1/σ²).
    pub w: Array2<S>,
    /// Phases uniform on `[0, 2π)`.
    pub b: Array1<S>,
    pub bandwidth: S,
    pub seed: u64,
}

impl<S: Scalar> RffMap<S> {
    pub fn new(dim: usize, features: usize, bandwidth: S, seed: u64) -> Result<Self> {
        if features == 0 || dim == 0 {
            return Err(AuditError::invalid("random Fourier map needs positive dimensions"));
        }
        if !(bandwidth > S::zero()) {
            return Err(AuditError::invalid("bandwidth must be positive"));
        }
        let mut rng = seed::rng(seed);
        let w = Array2::from_shape_simple_fn((dim, features), || {
            let z: f64 = rng.sample(StandardNormal);
            S::lit(z) / bandwidth
        });
        let b = Array1::from_shape_simple_fn(features, || S::lit(rng.random::<f64>()) * S::two_pi());
        Ok(RffMap { w, b, bandwidth, seed })
    }

    pub fn from_parts(w: Array2<S>, b: Array1<S>, bandwidth: S) -> Result<Self> {
        if w.ncols() != b.len() {
            return Err(AuditError::DimensionMismatch {
                expected: w.ncols(),
                got: b.len(),
            });
        }
        Ok(RffMap {
            w,
            b,
            bandwidth,
            seed: 0,
        })
    }

    pub fn input_dim(&self) -> usize {
        self.w.nrows()
    }

    pub fn features(&self) -> usize {
        self.w.ncols()
    }

    pub fn transform(&self, x: ArrayView2<S>) -> Result<Array2<S>> {
        if x.ncols() != self.input_dim() {
            return Err(AuditError::DimensionMismatch {
                expected: self.input_dim(),
                got: x.ncols(),
            });
        }
        let scale = (S::lit(2.0) / S::from_usize_lossy(self.features())).sqrt();
        let mut z = x.dot(&self.w);
        z += &self.b.view().insert_axis(Axis(0));
        z.mapv_inplace(|v| scale * v.cos());
        Ok(z)
    }
}

/// Free-function form of [`RffMap::transform`].
pub fn rff_features<S: Scalar>(x: ArrayView2<S>, map: &RffMap<S>) -> Result<Array2<S>> {
    map.transform(x)
}

use std::fmt;
use std::iter::Sum;

use nalgebra::RealField;
use ndarray::ScalarOperand;
use num_traits::{FromPrimitive, ToPrimitive};

/// Floating point scalar accepted by the numerical kernels: `f32` or `f64`.
pub trait Scalar:
    RealField + Copy + FromPrimitive + ToPrimitive + ScalarOperand + Sum + Send + Sync + fmt::Debug + fmt::Display + 'static
{
    /// Converts an `f64` literal; never fails for finite inputs.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize fits in float")
    }

    #[inline]
    fn to_real(self) -> f64 {
        self.to_f64().expect("float converts to f64")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

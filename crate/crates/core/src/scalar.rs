//! Floating scalar abstraction: f32 or f64.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Scalar type the numerics are generic over.
///
/// Bundles the arithmetic, constant and FFT bounds the crate needs; implemented
/// for `f32` and `f64`. RNG output and tabulated quadrature nodes are produced
/// in `f64` and narrowed through [`Scalar::real`], which is deterministic.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Sum
    + Display
    + LowerExp
    + Debug
    + Send
    + Sync
    + rustfft::FftNum
    + 'static
{
    /// Convert from `f64`, the canonical constant-carrying type.
    fn real(v: f64) -> Self;

    /// Widen to `f64` for reporting and statistics.
    fn f64(self) -> f64;

    fn usize(v: usize) -> Self {
        Self::real(v as f64)
    }
}

impl Scalar for f64 {
    #[inline]
    fn real(v: f64) -> Self {
        v
    }
    #[inline]
    fn f64(self) -> f64 {
        self
    }
}

impl Scalar for f32 {
    #[inline]
    fn real(v: f64) -> Self {
        v as f32
    }
    #[inline]
    fn f64(self) -> f64 {
        self as f64
    }
}

//! Floating-point abstraction for the numeric kernels.
//!
//! Everything in this crate is written against [`Scalar`] so the same code
//! runs at `f32` and `f64`. The accuracy contracts quoted in the module docs
//! (absolute error of the normal CDF, relative error of the quantile, and so
//! on) are stated for `f64`; at `f32` the kernels degrade gracefully to that
//! type's precision.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive};

/// Scalar type the statistical kernels are generic over.
///
/// `f32` and `f64` implement it; nothing in the crate assumes anything beyond
/// these bounds, so other IEEE-like types can opt in.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + Debug + Display + Send + Sync + 'static
{
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Converts an `f64` literal (coefficient tables, tolerances) into `R`.
///
/// Infallible for any sane float type: rounds to the nearest representable
/// value rather than failing.
#[inline]
pub(crate) fn lit<R: Scalar>(v: f64) -> R {
    R::from_f64(v).expect("float literal must convert")
}

/// Converts a count into `R` for forming averages.
#[inline]
pub(crate) fn count<R: Scalar>(v: u64) -> R {
    R::from_u64(v).expect("count must convert")
}

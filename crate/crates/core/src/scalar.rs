//! Scalar abstraction: every algorithm in this crate is written against
//! [`Real`] and instantiated with `f32` or `f64`.

use std::fmt::{Debug, Display, LowerExp};

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Floating-point scalar: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + NumAssign + Debug + Display + LowerExp + Send + Sync + 'static
{
}

impl Real for f32 {}
impl Real for f64 {}

/// Converts an `f64` literal into the working scalar type.
///
/// Panics if the value is not representable, which cannot happen for the
/// finite constants this crate feeds it.
#[inline]
pub fn cast<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("f64 constant not representable in scalar type")
}

/// `1/n` in the working scalar type.
#[inline]
pub(crate) fn recip_usize<T: Real>(n: usize) -> T {
    T::one() / T::from_usize(n).expect("usize not representable in scalar type")
}

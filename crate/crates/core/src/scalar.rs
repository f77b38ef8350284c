//! Scalar abstractions.
//!
//! Everything that only needs field arithmetic (Ω construction, Padé
//! coefficients, β, the Cayley-form transition matrix) is written against
//! [`Field`], so it runs unchanged on `f32`, `f64`, exact rationals, or the
//! operation-counting scalar in [`crate::analysis::tcvc`]. Code that needs
//! square roots or trigonometry asks for [`Real`].

use std::fmt::Debug;
use std::ops::Neg;

use num_traits::{Float, FloatConst, FromPrimitive, Num, ToPrimitive};

/// Ordered field with exact small-integer constants.
pub trait Field: Num + Neg<Output = Self> + Clone + PartialOrd + FromPrimitive + ToPrimitive + Debug {}

impl<T> Field for T where T: Num + Neg<Output = T> + Clone + PartialOrd + FromPrimitive + ToPrimitive + Debug {}

/// Floating-point scalar (`f32`, `f64`, or a wrapper around one).
pub trait Real: Field + Float + FloatConst {}

impl<T> Real for T where T: Field + Float + FloatConst {}

/// Converts a constant that is exactly representable in every supported
/// scalar (small dyadic rationals).
pub(crate) fn lit<T: Field>(x: f64) -> T {
    T::from_f64(x).expect("constant representable in scalar type")
}

pub(crate) fn from_count<T: Field>(n: usize) -> T {
    T::from_usize(n).expect("count representable in scalar type")
}

/// True when `x` converts to a finite `f64`.
pub fn is_finite<T: Field>(x: &T) -> bool {
    x.to_f64().is_some_and(f64::is_finite)
}

pub(crate) fn to_f64_lossy<T: Field>(x: &T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

pub(crate) fn abs<T: Field>(x: &T) -> T {
    if *x < T::zero() {
        -x.clone()
    } else {
        x.clone()
    }
}

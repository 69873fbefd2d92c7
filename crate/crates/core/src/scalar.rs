//! Scalar abstraction: every numeric routine in this crate is generic over
//! [`Real`], instantiated with `f32` or `f64`.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::AddAssign;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating-point scalar: `f32` or `f64`.
pub trait Real:
    Float + FromPrimitive + ToPrimitive + AddAssign + Sum + Display + Debug + Send + Sync + 'static
{
    /// 2π as `Self`.
    fn tau() -> Self {
        real(std::f64::consts::TAU)
    }

    /// π as `Self`.
    fn pi() -> Self {
        real(std::f64::consts::PI)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Converts an `f64` literal or parameter into `T`, rounding as needed.
pub fn real<T: Real>(v: f64) -> T {
    T::from_f64(v).expect("f64 converts into any Real scalar")
}

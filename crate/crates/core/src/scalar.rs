//! Scalar abstraction.
//!
//! All numerics are generic over a floating type `T: Real`; amplitudes are
//! `Complex<T>`. The bound collects what the algorithms actually use:
//! elementary functions from `Float`, π-family constants, and conversion
//! from integer counts and literal constants.

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use std::fmt::{Debug, Display};

/// Floating scalar the whole crate is generic over.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Send + Sync + 'static
{
    /// Lossy conversion from `f64`, for literal constants in generic code.
    fn from_f64_const(x: f64) -> Self {
        Self::from_f64(x).expect("finite f64 constant")
    }

    /// Lossy conversion from `usize` indices and counts.
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count fits the scalar")
    }

    /// Widening conversion to `f64` for order estimates and formatting.
    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar converts to f64")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Vector-space element over the scalar `T`: the state entries the
/// integrators act on, either `T` itself or `Complex<T>`.
pub trait Element<T: Real>:
    Copy + std::ops::Add<Output = Self> + std::ops::Sub<Output = Self> + std::ops::Neg<Output = Self>
{
    fn zero() -> Self;
    fn scale(self, s: T) -> Self;
    /// Squared modulus.
    fn abs2(self) -> T;
    fn abs(self) -> T {
        self.abs2().sqrt()
    }
}

impl<T: Real> Element<T> for T {
    fn zero() -> Self {
        T::zero()
    }
    fn scale(self, s: T) -> Self {
        self * s
    }
    fn abs2(self) -> T {
        self * self
    }
    fn abs(self) -> T {
        Float::abs(self)
    }
}

impl<T: Real> Element<T> for num_complex::Complex<T> {
    fn zero() -> Self {
        num_complex::Complex::new(T::zero(), T::zero())
    }
    fn scale(self, s: T) -> Self {
        num_complex::Complex::new(self.re * s, self.im * s)
    }
    fn abs2(self) -> T {
        self.re * self.re + self.im * self.im
    }
}

//! Floating-point scalar abstraction shared by every numerical module.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use rustfft::FftNum;

/// Real scalar type the solver and diagnostics are generic over (`f32` or `f64`).
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + FftNum + Sum + Display + Debug + Default
{
    /// Converts an `f64` literal into this scalar type.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    /// Lossy conversion to `f64`, used for I/O and reporting.
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable in scalar type")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// An integrability exponent in `[1, ∞]`, with infinity represented exactly.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Exponent<T> {
    Finite(T),
    Infinity,
}

impl<T: Copy> Exponent<T> {
    pub fn finite(self) -> Option<T> {
        match self {
            Exponent::Finite(x) => Some(x),
            Exponent::Infinity => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Exponent::Infinity)
    }
}

impl<T: Real> Exponent<T> {
    /// Maps a float to an exponent, sending `+inf` to [`Exponent::Infinity`].
    pub fn from_float(x: T) -> Self {
        if x.is_infinite() && x > T::zero() {
            Exponent::Infinity
        } else {
            Exponent::Finite(x)
        }
    }

    pub fn to_float(self) -> T {
        match self {
            Exponent::Finite(x) => x,
            Exponent::Infinity => T::infinity(),
        }
    }
}

impl<T: Display> Display for Exponent<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Exponent::Finite(x) => write!(f, "{x}"),
            Exponent::Infinity => write!(f, "inf"),
        }
    }
}

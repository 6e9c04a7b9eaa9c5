//! Scalar abstraction: the numerical core is generic over the floating-point
//! type; `f64` is the type used by the CLI and the acceptance workloads.

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};
use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

/// Floating-point scalar: f32 or f64.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + rustfft::FftNum
    + Display
    + LowerExp
    + Debug
    + Send
    + Sync
    + 'static
{
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Complex number over the generic scalar.
pub type Cplx<T> = Complex<T>;

/// Shorthand for converting an `f64` literal into the generic scalar.
#[inline]
pub fn lit<T: Scalar>(x: f64) -> T {
    T::from_f64(x).expect("literal representable in scalar type")
}

/// Exponential clamped so neither direction overflows; weighted integrands
/// see at most `exp(±690)` which keeps squares of weights finite in f64.
#[inline]
pub fn exp_clamped<T: Scalar>(x: T) -> T {
    let cap = lit::<T>(690.0);
    x.max(-cap).min(cap).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_clamp_limits() {
        assert!(exp_clamped(-100000.0f64) > 0.0);
        assert!(exp_clamped(100000.0f64).is_finite());
        assert_eq!(exp_clamped(0.5f64), 0.5f64.exp());
    }
}

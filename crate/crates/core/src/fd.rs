//! Second-order finite-difference stencils along one axis of an ndarray:
//! centered in the interior, one-sided at the edges (same order).

use ndarray::{Array, Axis, Dimension, Zip};
use num_traits::Zero;
use std::ops::{Add, Mul, Sub};

use crate::scalar::{lit, Scalar};

pub trait Element<T>:
    Copy + Zero + Add<Output = Self> + Sub<Output = Self> + Mul<T, Output = Self>
{
}
impl<T, E> Element<T> for E where
    E: Copy + Zero + Add<Output = E> + Sub<Output = E> + Mul<T, Output = E>
{
}

/// First derivative along `axis` with spacing `h`.
pub fn diff1<E, T, D>(v: &Array<E, D>, axis: Axis, h: T) -> Array<E, D>
where
    E: Element<T>,
    T: Scalar,
    D: Dimension,
{
    let mut out = Array::zeros(v.raw_dim());
    let inv2h = T::one() / (lit::<T>(2.0) * h);
    let c3 = lit::<T>(3.0) * inv2h;
    let c4 = lit::<T>(4.0) * inv2h;
    Zip::from(out.lanes_mut(axis))
        .and(v.lanes(axis))
        .for_each(|mut o, l| {
            let n = l.len();
            debug_assert!(n >= 3);
            o[0] = l[1] * c4 - l[0] * c3 - l[2] * inv2h;
            for i in 1..n - 1 {
                o[i] = (l[i + 1] - l[i - 1]) * inv2h;
            }
            o[n - 1] = l[n - 1] * c3 - l[n - 2] * c4 + l[n - 3] * inv2h;
        });
    out
}

/// Second derivative along `axis` with spacing `h`.
pub fn diff2<E, T, D>(v: &Array<E, D>, axis: Axis, h: T) -> Array<E, D>
where
    E: Element<T>,
    T: Scalar,
    D: Dimension,
{
    let mut out = Array::zeros(v.raw_dim());
    let invh2 = T::one() / (h * h);
    let two = lit::<T>(2.0) * invh2;
    let five = lit::<T>(5.0) * invh2;
    let four = lit::<T>(4.0) * invh2;
    Zip::from(out.lanes_mut(axis))
        .and(v.lanes(axis))
        .for_each(|mut o, l| {
            let n = l.len();
            debug_assert!(n >= 3);
            for i in 1..n - 1 {
                o[i] = (l[i + 1] + l[i - 1]) * invh2 - l[i] * two;
            }
            if n >= 4 {
                o[0] = l[0] * two - l[1] * five + l[2] * four - l[3] * invh2;
                o[n - 1] = l[n - 1] * two - l[n - 2] * five + l[n - 3] * four - l[n - 4] * invh2;
            } else {
                o[0] = o[1];
                o[n - 1] = o[1];
            }
        });
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array1;

    #[test]
    fn cubic_first_derivative_exact_interior_second_order_edges() {
        let n = 33;
        let h = 1.0 / (n - 1) as f64;
        let v = Array1::from_iter((0..n).map(|i| {
            let x = i as f64 * h;
            x * x * x
        }));
        let d = diff1(&v, Axis(0), h);
        for i in 0..n {
            let x = i as f64 * h;
            let err = (d[i] - 3.0 * x * x).abs();
            assert!(err < 5.0 * h * h, "i={i} err={err}");
        }
    }

    #[test]
    fn quartic_second_derivative_second_order() {
        let n = 65;
        let h = 2.0 / (n - 1) as f64;
        let v = Array1::from_iter((0..n).map(|i| {
            let x = -1.0 + i as f64 * h;
            x.powi(4)
        }));
        let d = diff2(&v, Axis(0), h);
        for i in 0..n {
            let x = -1.0 + i as f64 * h;
            let err = (d[i] - 12.0 * x * x).abs();
            assert!(err < 60.0 * h * h, "i={i} err={err}");
        }
    }
}

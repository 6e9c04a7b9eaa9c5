//! Complex banded LU factorization without pivoting.
//!
//! The Crank-Nicolson step matrix is `I + i c (-Laplace + q)` with real
//! symmetric second factor, which is strictly diagonally dominant in the
//! relevant regimes, so unpivoted elimination is stable here.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::scalar::{Cplx, Scalar};

/// Square banded matrix with equal lower/upper bandwidth.
#[derive(Debug, Clone)]
pub struct BandedMatrix<T> {
    n: usize,
    bw: usize,
    /// `data[(i, j - i + bw)] = A[i][j]` for `|i - j| <= bw`.
    data: Array2<Cplx<T>>,
}

impl<T: Scalar> BandedMatrix<T> {
    pub fn zeros(n: usize, bw: usize) -> Self {
        Self {
            n,
            bw,
            data: Array2::zeros((n, 2 * bw + 1)),
        }
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Cplx<T>) {
        debug_assert!(i < self.n && j < self.n);
        debug_assert!(i.abs_diff(j) <= self.bw);
        self.data[(i, j + self.bw - i)] = v;
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Cplx<T> {
        if i.abs_diff(j) <= self.bw && j < self.n {
            self.data[(i, j + self.bw - i)]
        } else {
            Cplx::new(T::zero(), T::zero())
        }
    }

    /// In-place LU factorization; errors on a vanishing pivot.
    pub fn factor(mut self) -> Result<BandedLu<T>> {
        let (n, bw) = (self.n, self.bw);
        for k in 0..n {
            let piv = self.data[(k, bw)];
            if piv.norm_sqr() == T::zero() {
                return Err(Error::Solver(format!("zero pivot at row {k}")));
            }
            let last = (k + bw).min(n - 1);
            for i in k + 1..=last {
                // A[i][k]
                let off_ik = k + bw - i;
                let l = self.data[(i, off_ik)] / piv;
                self.data[(i, off_ik)] = l;
                for j in k + 1..=last {
                    let a_kj = self.data[(k, j + bw - k)];
                    let off_ij = j + bw - i;
                    self.data[(i, off_ij)] = self.data[(i, off_ij)] - l * a_kj;
                }
            }
        }
        Ok(BandedLu {
            n,
            bw,
            data: self.data,
        })
    }
}

/// Factored form; `solve` performs forward/back substitution in place.
#[derive(Debug, Clone)]
pub struct BandedLu<T> {
    n: usize,
    bw: usize,
    data: Array2<Cplx<T>>,
}

impl<T: Scalar> BandedLu<T> {
    pub fn solve(&self, rhs: &mut [Cplx<T>]) {
        let (n, bw) = (self.n, self.bw);
        debug_assert_eq!(rhs.len(), n);
        for i in 0..n {
            let start = i.saturating_sub(bw);
            let mut acc = rhs[i];
            for j in start..i {
                acc = acc - self.data[(i, j + bw - i)] * rhs[j];
            }
            rhs[i] = acc;
        }
        for i in (0..n).rev() {
            let last = (i + bw).min(n - 1);
            let mut acc = rhs[i];
            for j in i + 1..=last {
                acc = acc - self.data[(i, j + bw - i)] * rhs[j];
            }
            rhs[i] = acc / self.data[(i, bw)];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_tridiagonal_system() {
        let n = 50;
        let mut m = BandedMatrix::<f64>::zeros(n, 1);
        for i in 0..n {
            m.set(i, i, Cplx::new(2.0, 1.0));
            if i > 0 {
                m.set(i, i - 1, Cplx::new(-1.0, 0.0));
            }
            if i + 1 < n {
                m.set(i, i + 1, Cplx::new(-1.0, 0.2));
            }
        }
        let want: Vec<Cplx<f64>> = (0..n)
            .map(|i| Cplx::new((i as f64).sin(), (i as f64 * 0.5).cos()))
            .collect();
        let mut rhs = vec![Cplx::new(0.0, 0.0); n];
        for i in 0..n {
            for j in i.saturating_sub(1)..(i + 2).min(n) {
                rhs[i] += m.get(i, j) * want[j];
            }
        }
        let lu = m.factor().unwrap();
        lu.solve(&mut rhs);
        for i in 0..n {
            assert!((rhs[i] - want[i]).norm() < 1e-11);
        }
    }

    #[test]
    fn solves_wide_band_system() {
        let n = 40;
        let bw = 7;
        let mut m = BandedMatrix::<f64>::zeros(n, bw);
        for i in 0..n {
            for j in i.saturating_sub(bw)..(i + bw + 1).min(n) {
                let v = if i == j {
                    Cplx::new(1.0, 20.0)
                } else {
                    Cplx::new(0.3 / (1.0 + i.abs_diff(j) as f64), -0.4)
                };
                m.set(i, j, v);
            }
        }
        let want: Vec<Cplx<f64>> = (0..n).map(|i| Cplx::new(1.0 / (1.0 + i as f64), -0.25)).collect();
        let mut rhs = vec![Cplx::new(0.0, 0.0); n];
        for i in 0..n {
            for j in i.saturating_sub(bw)..(i + bw + 1).min(n) {
                rhs[i] += m.get(i, j) * want[j];
            }
        }
        let lu = m.factor().unwrap();
        lu.solve(&mut rhs);
        for i in 0..n {
            assert!((rhs[i] - want[i]).norm() < 1e-10);
        }
    }

    #[test]
    fn zero_pivot_detected() {
        let mut m = BandedMatrix::<f64>::zeros(3, 1);
        m.set(0, 0, Cplx::new(0.0, 0.0));
        m.set(1, 1, Cplx::new(1.0, 0.0));
        m.set(2, 2, Cplx::new(1.0, 0.0));
        assert!(m.factor().is_err());
    }
}

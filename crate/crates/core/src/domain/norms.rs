//! Trapezoidal space-time quadrature and weighted L2 norms.

use ndarray::Array3;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::field::{ComplexField, Region};

/// Subset of the region a norm is taken over.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RegionSel<T> {
    Full,
    /// Axial nodes with `|x_n| <= half`.
    AxialAbsLe(T),
    /// Axial nodes with `lo <= |x_n| <= hi`.
    AxialAbsBetween(T, T),
}

impl<T: Scalar> RegionSel<T> {
    fn admits(&self, xn: T) -> bool {
        match *self {
            RegionSel::Full => true,
            RegionSel::AxialAbsLe(half) => xn.abs() <= half,
            RegionSel::AxialAbsBetween(lo, hi) => {
                let a = xn.abs();
                a >= lo && a <= hi
            }
        }
    }
}

/// `( integral weight |f|^2 )^(1/2)` by the grid's trapezoidal rule.
///
/// The weight field, when given, must have the same shape as `f`.
pub fn l2_norm<T: Scalar>(
    f: &ComplexField<T>,
    sel: RegionSel<T>,
    weight: Option<&Array3<T>>,
) -> Result<T> {
    if let Some(w) = weight {
        if w.dim() != f.values().dim() {
            return Err(Error::Region("weight shape differs from field".into()));
        }
    }
    if f.region() == Region::AxialEnds && !matches!(sel, RegionSel::Full) {
        return Err(Error::Region(
            "axial sub-selection on an axial-ends field".into(),
        ));
    }
    let grid = f.grid();
    let v = f.values();
    let mut acc = T::zero();
    for k in 0..grid.n_time {
        let wt = grid.time_weight(k);
        match f.region() {
            Region::Volume => {
                for i in 0..grid.n_xprime {
                    let wx = grid.xprime_weight(i);
                    for j in 0..grid.n_axial {
                        if !sel.admits(grid.axial(j)) {
                            continue;
                        }
                        let cell = wt * wx * grid.axial_weight(j);
                        let extra = weight.map_or(T::one(), |w| w[(k, i, j)]);
                        acc += cell * extra * v[(k, i, j)].norm_sqr();
                    }
                }
            }
            Region::Lateral => {
                // Counting measure on the two boundary points of d(omega).
                for side in 0..2 {
                    for j in 0..grid.n_axial {
                        if !sel.admits(grid.axial(j)) {
                            continue;
                        }
                        let cell = wt * grid.axial_weight(j);
                        let extra = weight.map_or(T::one(), |w| w[(k, side, j)]);
                        acc += cell * extra * v[(k, side, j)].norm_sqr();
                    }
                }
            }
            Region::AxialEnds => {
                for i in 0..grid.n_xprime {
                    for e in 0..2 {
                        let cell = wt * grid.xprime_weight(i);
                        let extra = weight.map_or(T::one(), |w| w[(k, i, e)]);
                        acc += cell * extra * v[(k, i, e)].norm_sqr();
                    }
                }
            }
        }
    }
    Ok(acc.max(T::zero()).sqrt())
}

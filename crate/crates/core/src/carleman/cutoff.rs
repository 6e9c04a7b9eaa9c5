//! Axial cutoff with a quintic-smoothstep transition band.

use ndarray::Axis;

use crate::domain::{ComplexField, Region};
use crate::error::{Error, Result};
use crate::fd::diff1;
use crate::scalar::{lit, Cplx, Scalar};

/// `chi(x_n)`: 1 on `|x_n| <= ell`, 0 on `|x_n| >= r_mid`, with a C^3
/// polynomial transition whose first three derivatives vanish at both band
/// ends. The extra derivative keeps the second-difference stencil second
/// order accurate across the band junctions.
#[derive(Debug, Clone)]
pub struct CutoffChi<T> {
    pub ell: T,
    pub r_mid: T,
}

impl<T: Scalar> CutoffChi<T> {
    /// Transition band `(ell, (ell + big_l) / 2)`.
    pub fn new(ell: T, big_l: T) -> Result<Self> {
        if ell <= T::zero() || big_l <= ell {
            return Err(Error::Carleman("cutoff needs 0 < ell < L".into()));
        }
        Ok(Self {
            ell,
            r_mid: (ell + big_l) * lit::<T>(0.5),
        })
    }

    fn xi(&self, x: T) -> T {
        (x.abs() - self.ell) / (self.r_mid - self.ell)
    }

    pub fn chi(&self, x: T) -> T {
        let a = x.abs();
        if a <= self.ell {
            T::one()
        } else if a >= self.r_mid {
            T::zero()
        } else {
            let u = self.xi(x);
            // smoothstep of order 7: 35u^4 - 84u^5 + 70u^6 - 20u^7
            let s = (((lit::<T>(-20.0) * u + lit::<T>(70.0)) * u - lit::<T>(84.0)) * u
                + lit::<T>(35.0))
                * u
                * u
                * u
                * u;
            T::one() - s
        }
    }

    pub fn chi_dot(&self, x: T) -> T {
        let a = x.abs();
        if a <= self.ell || a >= self.r_mid {
            T::zero()
        } else {
            let u = self.xi(x);
            let om = T::one() - u;
            let sp = lit::<T>(140.0) * u * u * u * om * om * om;
            -sp / (self.r_mid - self.ell) * x.signum()
        }
    }

    pub fn chi_ddot(&self, x: T) -> T {
        let a = x.abs();
        if a <= self.ell || a >= self.r_mid {
            T::zero()
        } else {
            let u = self.xi(x);
            let om = T::one() - u;
            let spp =
                lit::<T>(420.0) * u * u * om * om * (T::one() - lit::<T>(2.0) * u);
            let w = self.r_mid - self.ell;
            -spp / (w * w)
        }
    }
}

/// Pointwise multiplication of a volume field by the cutoff.
pub fn apply_cutoff<T: Scalar>(v: &ComplexField<T>, chi: &CutoffChi<T>) -> Result<ComplexField<T>> {
    if v.region() != Region::Volume {
        return Err(Error::Region("cutoff acts on volume fields".into()));
    }
    let grid = v.grid().clone();
    let mut out = v.values().clone();
    for j in 0..grid.n_axial {
        let c = chi.chi(grid.axial(j));
        for k in 0..grid.n_time {
            for i in 0..grid.n_xprime {
                out[(k, i, j)] = out[(k, i, j)] * c;
            }
        }
    }
    ComplexField::new(grid, Region::Volume, out)
}

/// The commutator source `K v = chi'' v + 2 chi' d_{x_n} v`.
pub fn commutator_kv<T: Scalar>(
    v: &ComplexField<T>,
    chi: &CutoffChi<T>,
) -> Result<ComplexField<T>> {
    if v.region() != Region::Volume {
        return Err(Error::Region("commutator acts on volume fields".into()));
    }
    let grid = v.grid().clone();
    let dxn = diff1(v.values(), Axis(2), grid.h_axial());
    let mut out = ndarray::Array3::<Cplx<T>>::zeros(v.values().raw_dim());
    let two = lit::<T>(2.0);
    for j in 0..grid.n_axial {
        let xn = grid.axial(j);
        let cd = chi.chi_dot(xn);
        let cdd = chi.chi_ddot(xn);
        if cd == T::zero() && cdd == T::zero() {
            continue;
        }
        for k in 0..grid.n_time {
            for i in 0..grid.n_xprime {
                out[(k, i, j)] = v.values()[(k, i, j)] * cdd + dxn[(k, i, j)] * (two * cd);
            }
        }
    }
    ComplexField::new(grid, Region::Volume, out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{make_grid, GridConfig, SpaceTimeGrid, TimeAxis};
    use std::sync::Arc;

    fn grid(na: usize) -> Arc<SpaceTimeGrid<f64>> {
        Arc::new(
            make_grid(&GridConfig {
                omega: (0.0, 1.0),
                axial_halfwidth: 4.0,
                time_halfwidth: 1.0,
                support_halfwidth: 2.0,
                n_xprime: 7,
                n_axial: na,
                n_time: 6,
                time_axis: TimeAxis::Symmetric,
            })
            .unwrap(),
        )
    }

    #[test]
    fn plateau_and_support() {
        let chi: CutoffChi<f64> = CutoffChi::new(1.0, 2.0).unwrap();
        assert_eq!(chi.r_mid, 1.5);
        assert_eq!(chi.chi(0.3), 1.0);
        assert_eq!(chi.chi(-0.999), 1.0);
        assert_eq!(chi.chi(1.5), 0.0);
        assert_eq!(chi.chi(3.0), 0.0);
        let mid = chi.chi(1.25);
        assert!(mid > 0.0 && mid < 1.0);
        assert!((chi.chi(1.25) - 0.5).abs() < 1e-12);
        for x in [1.0f64, 1.5, -1.0, -1.5] {
            assert_eq!(chi.chi_dot(x), 0.0);
            assert_eq!(chi.chi_ddot(x), 0.0);
        }
        // Derivatives supported in the band, consistent with quotients.
        let h = 1e-6f64;
        for x in [1.1f64, 1.3, -1.2, -1.45] {
            let fd = (chi.chi(x + h) - chi.chi(x - h)) / (2.0 * h);
            assert!((fd - chi.chi_dot(x)).abs() < 1e-7);
            let fd2 = (chi.chi_dot(x + h) - chi.chi_dot(x - h)) / (2.0 * h);
            assert!((fd2 - chi.chi_ddot(x)).abs() < 1e-5);
        }
    }

    #[test]
    fn kv_vanishes_on_plateau_supported_field() {
        let g = grid(65);
        let chi = CutoffChi::new(1.0, 2.0).unwrap();
        let v = ComplexField::from_fn(g.clone(), |_, xp, xn| {
            if xn.abs() < 0.9 {
                Cplx::new(xp * (1.0 - (xn / 0.9) * (xn / 0.9)), 0.0)
            } else {
                Cplx::new(0.0, 0.0)
            }
        });
        let kv = commutator_kv(&v, &chi).unwrap();
        assert_eq!(kv.max_abs(), 0.0);
    }

    #[test]
    fn kv_of_constant_is_chi_ddot() {
        let g = grid(129);
        let chi = CutoffChi::new(1.0, 2.0).unwrap();
        let v = ComplexField::from_fn(g.clone(), |_, _, _| Cplx::new(1.0, 0.0));
        let kv = commutator_kv(&v, &chi).unwrap();
        for j in 0..g.n_axial {
            let want = chi.chi_ddot(g.axial(j));
            assert!((kv.values()[(0, 3, j)].re - want).abs() < 1e-12);
        }
    }

    #[test]
    fn commutator_identity_second_order() {
        // Lap(chi v) - chi Lap(v) = K v at second order on smooth v.
        let chi = CutoffChi::new(1.0, 2.0).unwrap();
        let errs: Vec<f64> = [65usize, 129, 257]
            .iter()
            .map(|&na| {
                let g = grid(na);
                let v = ComplexField::from_fn(g.clone(), |_, xp, xn| {
                    Cplx::new((0.7 * xn).sin() * (1.0 + xp), (0.4 * xn).cos())
                });
                let chi_v = apply_cutoff(&v, &chi).unwrap();
                let lap = |f: &ComplexField<f64>| {
                    crate::fd::diff2(f.values(), Axis(2), g.h_axial())
                };
                let lhs = lap(&chi_v);
                let lap_v = lap(&v);
                let kv = commutator_kv(&v, &chi).unwrap();
                let mut worst = 0.0f64;
                for j in 0..g.n_axial {
                    let c = chi.chi(g.axial(j));
                    for k in 0..g.n_time {
                        for i in 0..g.n_xprime {
                            let want = lhs[(k, i, j)] - lap_v[(k, i, j)] * c;
                            let got = kv.values()[(k, i, j)];
                            worst = worst.max((want - got).norm());
                        }
                    }
                }
                worst
            })
            .collect();
        let p1 = (errs[0] / errs[1]).log2();
        let p2 = (errs[1] / errs[2]).log2();
        assert!(
            (1.5..2.5).contains(&p1) && (1.5..2.5).contains(&p2),
            "orders {p1} {p2} ({errs:?})"
        );
    }
}

//! Lateral subboundaries and the Neumann trace.
//!
//! With a one-dimensional cross-section the lateral boundary has two
//! components, `x' = a` and `x' = b`. The outward normal has no axial
//! component, so the normal derivative reduces to the one-sided transverse
//! derivative times the sign of the outward normal.

use ndarray::Array3;

use crate::error::{Error, Result};
use crate::scalar::{lit, Cplx, Scalar};

use super::field::{ComplexField, Region};
use super::grid::SpaceTimeGrid;

/// One component of `d(omega)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Side {
    /// `x' = a`, outward normal `-1`.
    Lo,
    /// `x' = b`, outward normal `+1`.
    Hi,
}

impl Side {
    pub fn index(self) -> usize {
        match self {
            Side::Lo => 0,
            Side::Hi => 1,
        }
    }

    pub fn normal<T: Scalar>(self) -> T {
        match self {
            Side::Lo => -T::one(),
            Side::Hi => T::one(),
        }
    }

    pub const BOTH: [Side; 2] = [Side::Lo, Side::Hi];
}

/// Axial extent of a subboundary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AxialExtent<T> {
    /// The whole truncated axis, standing in for the real line.
    Full,
    /// A finite interval `(lo, hi)` strictly inside `(-X, X)`.
    Interval(T, T),
}

/// A subset of the lateral boundary: chosen sides of `d(omega)` crossed
/// with an axial extent.
#[derive(Debug, Clone, PartialEq)]
pub struct Subboundary<T> {
    sides: Vec<Side>,
    axial: AxialExtent<T>,
}

impl<T: Scalar> Subboundary<T> {
    pub fn new(mut sides: Vec<Side>, axial: AxialExtent<T>) -> Result<Self> {
        sides.sort();
        sides.dedup();
        if sides.is_empty() {
            return Err(Error::Boundary("subboundary has no sides".into()));
        }
        if let AxialExtent::Interval(lo, hi) = axial {
            if hi <= lo {
                return Err(Error::Boundary("empty axial interval".into()));
            }
        }
        Ok(Self { sides, axial })
    }

    pub fn full_lateral() -> Self {
        Self {
            sides: vec![Side::Lo, Side::Hi],
            axial: AxialExtent::Full,
        }
    }

    pub fn sides(&self) -> &[Side] {
        &self.sides
    }

    pub fn axial(&self) -> AxialExtent<T> {
        self.axial
    }

    pub fn has_side(&self, side: Side) -> bool {
        self.sides.contains(&side)
    }

    pub fn contains(&self, side: Side, xn: T) -> bool {
        self.has_side(side)
            && match self.axial {
                AxialExtent::Full => true,
                AxialExtent::Interval(lo, hi) => xn >= lo && xn <= hi,
            }
    }

    /// Member points as `(side, axial index)` pairs on a grid.
    pub fn points(&self, grid: &SpaceTimeGrid<T>) -> Vec<(Side, usize)> {
        let mut pts = Vec::new();
        for &side in &self.sides {
            for j in 0..grid.n_axial {
                if self.contains(side, grid.axial(j)) {
                    pts.push((side, j));
                }
            }
        }
        pts
    }

    fn check_on_grid(&self, grid: &SpaceTimeGrid<T>) -> Result<()> {
        if let AxialExtent::Interval(lo, hi) = self.axial {
            let x = grid.axial_halfwidth;
            if lo <= -x || hi >= x {
                return Err(Error::Boundary(
                    "subboundary touches axial ends".into(),
                ));
            }
        }
        Ok(())
    }
}

/// Outward normal derivative of a volume field on a lateral subboundary.
///
/// Second-order one-sided stencils in `x'`; entries outside `b` are zero.
pub fn neumann_trace<T: Scalar>(
    f: &ComplexField<T>,
    b: &Subboundary<T>,
) -> Result<ComplexField<T>> {
    if f.region() != Region::Volume {
        return Err(Error::Region("neumann_trace needs a volume field".into()));
    }
    let grid = f.grid().clone();
    b.check_on_grid(&grid)?;
    let nx = grid.n_xprime;
    let inv2h = T::one() / (lit::<T>(2.0) * grid.h_xprime());
    let three = lit::<T>(3.0);
    let four = lit::<T>(4.0);
    let v = f.values();
    let mut out = Array3::<Cplx<T>>::zeros((grid.n_time, 2, grid.n_axial));
    for k in 0..grid.n_time {
        for &side in b.sides() {
            for j in 0..grid.n_axial {
                if !b.contains(side, grid.axial(j)) {
                    continue;
                }
                // df/dx' at the wall, then times the outward normal.
                let d = match side {
                    Side::Lo => {
                        (v[(k, 0, j)] * -three + v[(k, 1, j)] * four - v[(k, 2, j)]) * inv2h
                    }
                    Side::Hi => {
                        (v[(k, nx - 1, j)] * three - v[(k, nx - 2, j)] * four
                            + v[(k, nx - 3, j)])
                            * inv2h
                    }
                };
                out[(k, side.index(), j)] = d * side.normal::<T>();
            }
        }
    }
    ComplexField::new(grid, Region::Lateral, out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::grid::{make_grid, GridConfig, TimeAxis};
    use std::sync::Arc;

    fn grid(n_xprime: usize) -> Arc<SpaceTimeGrid<f64>> {
        Arc::new(
            make_grid(&GridConfig {
                omega: (0.0, 1.0),
                axial_halfwidth: 4.0,
                time_halfwidth: 1.0,
                support_halfwidth: 1.5,
                n_xprime,
                n_axial: 17,
                n_time: 5,
                time_axis: TimeAxis::Symmetric,
            })
            .unwrap(),
        )
    }

    fn g_profile(t: f64, xn: f64) -> f64 {
        (1.0 + 0.5 * t) * (-0.3 * xn * xn).exp()
    }

    #[test]
    fn sine_trace_matches_analytic_derivative() {
        for (n, expect_fac) in [(17usize, 1.0), (33usize, 0.25)] {
            let g = grid(n);
            let f = ComplexField::from_fn(g.clone(), |t, xp, xn| {
                Cplx::new((std::f64::consts::PI * xp).sin() * g_profile(t, xn), 0.0)
            });
            let b = Subboundary::new(vec![Side::Hi], AxialExtent::Full).unwrap();
            let tr = neumann_trace(&f, &b).unwrap();
            let mut worst = 0.0f64;
            for k in 0..g.n_time {
                for j in 0..g.n_axial {
                    let want = -std::f64::consts::PI * g_profile(g.time(k), g.axial(j));
                    let got = tr.values()[(k, 1, j)].re;
                    worst = worst.max((got - want).abs());
                }
            }
            // O(h'^2): the factor-4 grid refinement shrinks the bound by 4.
            assert!(
                worst < 0.08 * expect_fac,
                "n={n} worst={worst}"
            );
        }
    }

    #[test]
    fn zero_field_zero_trace() {
        let g = grid(9);
        let f = ComplexField::zeros(g, Region::Volume);
        let tr = neumann_trace(&f, &Subboundary::full_lateral()).unwrap();
        assert!(tr.max_abs() == 0.0);
    }

    #[test]
    fn linear_field_exact_at_lo_side() {
        let g = grid(9);
        let f = ComplexField::from_fn(g.clone(), |t, xp, xn| {
            Cplx::new(xp * g_profile(t, xn), 0.0)
        });
        let b = Subboundary::new(vec![Side::Lo], AxialExtent::Full).unwrap();
        let tr = neumann_trace(&f, &b).unwrap();
        for k in 0..g.n_time {
            for j in 0..g.n_axial {
                let want = -g_profile(g.time(k), g.axial(j));
                assert!((tr.values()[(k, 0, j)].re - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn interval_touching_ends_rejected() {
        let g = grid(9);
        let f = ComplexField::zeros(g, Region::Volume);
        let b = Subboundary::new(vec![Side::Hi], AxialExtent::Interval(-4.0, 2.0)).unwrap();
        assert!(neumann_trace(&f, &b).is_err());
    }
}

//! Difference systems for a potential pair and the time symmetrization.

use std::sync::Arc;

use ndarray::Array3;

use crate::domain::{ComplexField, Region, SpaceTimeGrid, TimeAxis};
use crate::error::{Error, Result};
use crate::scalar::{lit, Cplx, Scalar};

use super::potential::{InitialState, Potential};
use super::solver::{boundary_data_g, solve_derivative, solve_schrodinger};

/// Output of one two-potential linearization run on the forward span.
pub struct DifferenceSystem<T> {
    /// `u = u1 - u2`.
    pub u: ComplexField<T>,
    /// `v = u1' - u2'` from the differentiated solves.
    pub v: ComplexField<T>,
    /// Source of the differentiated difference system: `(q2 - q1) u2'`.
    pub f_prime: ComplexField<T>,
    /// `u2` and `u2'`, kept for sup-norm diagnostics.
    pub u2: ComplexField<T>,
    pub u2_prime: ComplexField<T>,
}

/// Runs the four solves behind the difference systems.
pub fn difference_system<T: Scalar>(
    q1: &Potential<T>,
    q2: &Potential<T>,
    u0: &InitialState<T>,
    grid: &Arc<SpaceTimeGrid<T>>,
) -> Result<DifferenceSystem<T>> {
    q1.check_pair(q2, grid)?;
    let g = boundary_data_g(u0, &q1.background, grid);
    let u1 = solve_schrodinger(q1, u0, &g, grid)?;
    let u2 = solve_schrodinger(q2, u0, &g, grid)?;
    let u1p = solve_derivative(q1, u0, grid)?;
    let u2p = solve_derivative(q2, u0, grid)?;
    let minus_one = Cplx::new(-T::one(), T::zero());
    let u = u1.axpy(minus_one, &u2)?;
    let v = u1p.axpy(minus_one, &u2p)?;
    let mut f_prime = u2p.values().clone();
    for k in 0..grid.n_time {
        for i in 0..grid.n_xprime {
            for j in 0..grid.n_axial {
                f_prime[(k, i, j)] =
                    f_prime[(k, i, j)] * (q2.values[(i, j)] - q1.values[(i, j)]);
            }
        }
    }
    Ok(DifferenceSystem {
        u,
        v,
        f_prime: ComplexField::new(grid.clone(), Region::Volume, f_prime)?,
        u2,
        u2_prime: u2p,
    })
}

/// Linearly interpolates a forward-span field at time `t in [0, T]`.
pub fn interp_time_slice<T: Scalar>(
    f: &ComplexField<T>,
    t: T,
) -> Result<ndarray::Array2<Cplx<T>>> {
    let grid = f.grid();
    if grid.time_axis != TimeAxis::Forward {
        return Err(Error::Solver("interpolation expects a forward span".into()));
    }
    let dt = grid.dt();
    let pos = t / dt;
    let k0 = pos
        .floor()
        .to_usize()
        .unwrap_or(0)
        .min(grid.n_time - 2);
    let frac = pos - lit::<T>(k0 as f64);
    let v = f.values();
    let mut out = ndarray::Array2::zeros((grid.n_xprime, grid.n_axial));
    for i in 0..grid.n_xprime {
        for j in 0..grid.n_axial {
            let a = v[(k0, i, j)];
            let b = v[(k0 + 1, i, j)];
            out[(i, j)] = a + (b - a) * frac;
        }
    }
    Ok(out)
}

/// Extends a forward-span field to the symmetric span by the reflection
/// rule `v(-t) = -conj(v(t))`.
///
/// Requires `v(0, .)` purely imaginary, otherwise the extension would jump
/// at `t = 0`. Values at staggered target nodes come from linear
/// interpolation in time on the forward span.
pub fn symmetrize_time<T: Scalar>(
    v: &ComplexField<T>,
    sym_grid: &Arc<SpaceTimeGrid<T>>,
) -> Result<ComplexField<T>> {
    let fwd = v.grid();
    if fwd.time_axis != TimeAxis::Forward {
        return Err(Error::Symmetrize("input must live on the forward span".into()));
    }
    if sym_grid.time_axis != TimeAxis::Symmetric {
        return Err(Error::Symmetrize("target must be a symmetric grid".into()));
    }
    if sym_grid.n_xprime != fwd.n_xprime
        || sym_grid.n_axial != fwd.n_axial
        || sym_grid.time_halfwidth != fwd.time_halfwidth
    {
        return Err(Error::Symmetrize("grid extents differ".into()));
    }
    let vals = v.values();
    let mut max0 = T::zero();
    let mut max_re0 = T::zero();
    for i in 0..fwd.n_xprime {
        for j in 0..fwd.n_axial {
            max0 = max0.max(vals[(0, i, j)].norm());
            max_re0 = max_re0.max(vals[(0, i, j)].re.abs());
        }
    }
    if max_re0 > lit::<T>(1e-8) * max0 {
        return Err(Error::Symmetrize(
            "initial slice is not purely imaginary".into(),
        ));
    }
    let mut out = Array3::zeros((sym_grid.n_time, sym_grid.n_xprime, sym_grid.n_axial));
    for k in 0..sym_grid.n_time {
        let t = sym_grid.time(k);
        let slice = interp_time_slice(v, t.abs())?;
        for i in 0..sym_grid.n_xprime {
            for j in 0..sym_grid.n_axial {
                out[(k, i, j)] = if t >= T::zero() {
                    slice[(i, j)]
                } else {
                    -slice[(i, j)].conj()
                };
            }
        }
    }
    ComplexField::new(sym_grid.clone(), Region::Volume, out)
}

//! Both sides of the weighted observability estimates.
//!
//! One kernel serves the three variants: the bounded box (full gradient on
//! a truncated subgrid), the cylinder (transverse gradient on the full
//! box), and the dimension-reduced transverse plane (no axial axis at
//! all). Weighted exponentials are evaluated in log space and clamped, so
//! large `s` degrades to zero contributions instead of NaN.

use std::sync::Arc;

use ndarray::{Array2, Axis};
use serde::Serialize;

use crate::domain::{
    make_grid, neumann_trace, AxialExtent, ComplexField, GridConfig, Region, Side,
    SpaceTimeGrid, Subboundary,
};
use crate::error::{Error, Result};
use crate::fd::{diff1, diff2};
use crate::scalar::{exp_clamped, lit, Cplx, Scalar};
use crate::weights::{apply_m1, apply_m2, conjugate_by_weight, CarlemanWeights};

/// Which gradient enters the first left-hand term.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GradientMode {
    /// Transverse and axial parts (bounded-domain estimate).
    Full,
    /// Transverse part only (cylinder estimate).
    Transverse,
}

/// All terms entering one estimate evaluation at a single `s`.
#[derive(Debug, Clone, Serialize)]
pub struct CarlemanReport {
    pub s: f64,
    pub lhs_grad: f64,
    pub lhs_s3: f64,
    pub lhs_m1: f64,
    pub lhs_m2: f64,
    pub rhs_boundary: f64,
    pub rhs_source: f64,
    /// Boundary term with the flat `exp(-2 s eta(0,.))` weight instead of
    /// the `phi (d_nu beta)`-weighted one (both are reported because the
    /// constant absorbing the latter is unquantified).
    pub obs_boundary: f64,
    pub degenerate: bool,
}

impl CarlemanReport {
    pub fn lhs_total(&self) -> f64 {
        self.lhs_grad + self.lhs_s3 + self.lhs_m1 + self.lhs_m2
    }

    pub fn rhs_total(&self) -> f64 {
        self.rhs_boundary + self.rhs_source
    }

    pub fn ratio(&self) -> Option<f64> {
        let rhs = self.rhs_total();
        if self.degenerate || rhs <= 0.0 || !rhs.is_finite() {
            None
        } else {
            Some(self.lhs_total() / rhs)
        }
    }
}

/// `exp(-2 s eta)` sampled on the `(t, x')` plane.
fn squared_weight_table<T: Scalar>(
    w: &CarlemanWeights<T>,
    grid: &SpaceTimeGrid<T>,
    s: T,
) -> Array2<T> {
    let mut out = Array2::zeros((grid.n_time, grid.n_xprime));
    for k in 0..grid.n_time {
        let t = grid.time(k);
        for i in 0..grid.n_xprime {
            out[(k, i)] = exp_clamped(-lit::<T>(2.0) * s * w.eta(t, grid.xprime(i)));
        }
    }
    out
}

/// The four left-hand terms.
pub fn lhs_terms<T: Scalar>(
    field: &ComplexField<T>,
    w: &CarlemanWeights<T>,
    s: T,
    grad: GradientMode,
) -> Result<(T, T, T, T)> {
    let grid = field.grid().clone();
    let v = field.values();
    let ew2 = squared_weight_table(w, &grid, s);
    let dxp = diff1(v, Axis(1), grid.h_xprime());
    let dxn = match grad {
        GradientMode::Full => Some(diff1(v, Axis(2), grid.h_axial())),
        GradientMode::Transverse => None,
    };
    let mut grad_acc = T::zero();
    let mut s3_acc = T::zero();
    for k in 0..grid.n_time {
        let wt = grid.time_weight(k);
        for i in 0..grid.n_xprime {
            let cell_row = wt * grid.xprime_weight(i);
            let ew = ew2[(k, i)];
            for j in 0..grid.n_axial {
                let cell = cell_row * grid.axial_weight(j) * ew;
                let mut g2 = dxp[(k, i, j)].norm_sqr();
                if let Some(dn) = &dxn {
                    g2 += dn[(k, i, j)].norm_sqr();
                }
                grad_acc += cell * g2;
                s3_acc += cell * v[(k, i, j)].norm_sqr();
            }
        }
    }
    let phi_field = conjugate_by_weight(field, w, s)?;
    let m1 = apply_m1(&phi_field, w, s)?;
    let m2 = apply_m2(&phi_field, w, s)?;
    let plain_sq = |f: &ComplexField<T>| -> T {
        let mut acc = T::zero();
        let fv = f.values();
        for k in 0..grid.n_time {
            let wt = grid.time_weight(k);
            for i in 0..grid.n_xprime {
                let cr = wt * grid.xprime_weight(i);
                for j in 0..grid.n_axial {
                    acc += cr * grid.axial_weight(j) * fv[(k, i, j)].norm_sqr();
                }
            }
        }
        acc
    };
    Ok((
        s * grad_acc,
        s * s * s * s3_acc,
        plain_sq(&m1),
        plain_sq(&m2),
    ))
}

fn boundary_terms<T: Scalar>(
    field: &ComplexField<T>,
    w: &CarlemanWeights<T>,
    s: T,
    observed: &Subboundary<T>,
) -> Result<(T, T)> {
    let grid = field.grid().clone();
    // Only sides with positive outward slope of beta carry the weight.
    let sides: Vec<Side> = observed
        .sides()
        .iter()
        .copied()
        .filter(|&side| w.beta_normal(side) > T::zero())
        .collect();
    if sides.is_empty() {
        return Ok((T::zero(), T::zero()));
    }
    let masked = Subboundary::new(sides, observed.axial())?;
    let tr = neumann_trace(field, &masked)?;
    let trv = tr.values();
    let two = lit::<T>(2.0);
    let mut weighted = T::zero();
    let mut flat = T::zero();
    for &side in masked.sides() {
        let xp = match side {
            Side::Lo => grid.omega.0,
            Side::Hi => grid.omega.1,
        };
        let bnu = w.beta_normal(side);
        let e0 = exp_clamped(-two * s * w.eta0(xp));
        for k in 0..grid.n_time {
            let t = grid.time(k);
            let ew = exp_clamped(-two * s * w.eta(t, xp));
            let phi = w.phi(t, xp);
            let wt = grid.time_weight(k);
            for j in 0..grid.n_axial {
                if !masked.contains(side, grid.axial(j)) {
                    continue;
                }
                let cell = wt * grid.axial_weight(j) * trv[(k, side.index(), j)].norm_sqr();
                weighted += cell * ew * phi * bnu;
                flat += cell * e0;
            }
        }
    }
    Ok((s * weighted, s * flat))
}

fn evaluate<T: Scalar>(
    field: &ComplexField<T>,
    source: Option<&ComplexField<T>>,
    w: &CarlemanWeights<T>,
    s: T,
    observed: &Subboundary<T>,
    grad: GradientMode,
) -> Result<CarlemanReport> {
    if s <= T::zero() {
        return Err(Error::Carleman("s must be positive".into()));
    }
    let grid = field.grid().clone();
    let (lhs_grad, lhs_s3, lhs_m1, lhs_m2) = lhs_terms(field, w, s, grad)?;
    let src = match source {
        Some(f) => f.clone(),
        None => crate::forward::apply_schrodinger_operator(field, None)?,
    };
    let ew2 = squared_weight_table(w, &grid, s);
    let mut rhs_source = T::zero();
    for k in 0..grid.n_time {
        let wt = grid.time_weight(k);
        for i in 0..grid.n_xprime {
            let cr = wt * grid.xprime_weight(i) * ew2[(k, i)];
            for j in 0..grid.n_axial {
                rhs_source += cr * grid.axial_weight(j) * src.values()[(k, i, j)].norm_sqr();
            }
        }
    }
    let (rhs_boundary, obs_boundary) = boundary_terms(field, w, s, observed)?;
    let to = |x: T| x.to_f64().unwrap_or(f64::NAN);
    let rep = CarlemanReport {
        s: to(s),
        lhs_grad: to(lhs_grad),
        lhs_s3: to(lhs_s3),
        lhs_m1: to(lhs_m1),
        lhs_m2: to(lhs_m2),
        rhs_boundary: to(rhs_boundary),
        rhs_source: to(rhs_source),
        obs_boundary: to(obs_boundary),
        degenerate: false,
    };
    let degenerate = !(rep.lhs_total().is_finite() && rep.rhs_total().is_finite())
        || rep.rhs_total() <= 0.0;
    Ok(CarlemanReport { degenerate, ..rep })
}

fn max_abs_on_lateral<T: Scalar>(field: &ComplexField<T>) -> T {
    let grid = field.grid();
    let v = field.values();
    let mut m = T::zero();
    for k in 0..grid.n_time {
        for j in 0..grid.n_axial {
            m = m.max(v[(k, 0, j)].norm());
            m = m.max(v[(k, grid.n_xprime - 1, j)].norm());
        }
    }
    m
}

fn max_abs_on_caps<T: Scalar>(field: &ComplexField<T>) -> T {
    let grid = field.grid();
    let v = field.values();
    let mut m = T::zero();
    for k in 0..grid.n_time {
        for i in 0..grid.n_xprime {
            m = m.max(v[(k, i, 0)].norm());
            m = m.max(v[(k, i, grid.n_axial - 1)].norm());
        }
    }
    m
}

/// Bounded-box estimate: full gradient, field vanishing on the whole box
/// boundary (the field is expected on a truncated subgrid, see
/// [`extract_obox`]).
pub fn carleman_sides_bounded<T: Scalar>(
    field: &ComplexField<T>,
    source: Option<&ComplexField<T>>,
    w: &CarlemanWeights<T>,
    s: T,
    gamma_tilde: &Subboundary<T>,
) -> Result<CarlemanReport> {
    let tol = lit::<T>(1e-8) * field.max_abs().max(T::epsilon());
    if max_abs_on_lateral(field) > tol || max_abs_on_caps(field) > tol {
        return Err(Error::Carleman(
            "field does not vanish on the box boundary".into(),
        ));
    }
    evaluate(field, source, w, s, gamma_tilde, GradientMode::Full)
}

/// Cylinder estimate: transverse gradient, field vanishing on the lateral
/// boundary and negligible at the axial truncation.
pub fn carleman_sides_cylinder<T: Scalar>(
    field: &ComplexField<T>,
    source: Option<&ComplexField<T>>,
    w: &CarlemanWeights<T>,
    s: T,
    gamma_star: &Subboundary<T>,
) -> Result<CarlemanReport> {
    let tol = lit::<T>(1e-8) * field.max_abs().max(T::epsilon());
    if max_abs_on_lateral(field) > tol {
        return Err(Error::Carleman(
            "field does not vanish on the lateral boundary".into(),
        ));
    }
    evaluate(field, source, w, s, gamma_star, GradientMode::Transverse)
}

/// Restriction of a volume field to the axial window `|x_n| <= l_o`
/// (snapped to the node lattice), on its own subgrid.
pub fn extract_obox<T: Scalar>(
    field: &ComplexField<T>,
    l_o: T,
    support_halfwidth: T,
) -> Result<ComplexField<T>> {
    let grid = field.grid().clone();
    let tol = grid.h_axial() * lit::<T>(0.5);
    let mut j_lo = None;
    for j in 0..grid.n_axial {
        if grid.axial(j) >= -l_o - tol {
            j_lo = Some(j);
            break;
        }
    }
    let j_lo = j_lo.ok_or_else(|| Error::Carleman("window misses the grid".into()))?;
    let j_hi = grid.n_axial - 1 - j_lo;
    if j_hi <= j_lo + 1 {
        return Err(Error::Carleman("axial window too narrow".into()));
    }
    let n_axial = j_hi - j_lo + 1;
    let halfwidth = grid.axial(j_hi);
    let sub = Arc::new(make_grid(&GridConfig {
        omega: grid.omega,
        axial_halfwidth: halfwidth,
        time_halfwidth: grid.time_halfwidth,
        support_halfwidth,
        n_xprime: grid.n_xprime,
        n_axial,
        n_time: grid.n_time,
        time_axis: grid.time_axis,
    })?);
    let mut out = ndarray::Array3::zeros((grid.n_time, grid.n_xprime, n_axial));
    for k in 0..grid.n_time {
        for i in 0..grid.n_xprime {
            for j in 0..n_axial {
                out[(k, i, j)] = field.values()[(k, i, j_lo + j)];
            }
        }
    }
    ComplexField::new(sub, Region::Volume, out)
}

/// Transverse plane field `(t, x')` for the dimension-reduced evaluation.
#[derive(Debug, Clone)]
pub struct TransverseField<T> {
    pub grid: Arc<SpaceTimeGrid<T>>,
    pub values: Array2<Cplx<T>>,
}

impl<T: Scalar> TransverseField<T> {
    pub fn new(grid: Arc<SpaceTimeGrid<T>>, values: Array2<Cplx<T>>) -> Result<Self> {
        if values.dim() != (grid.n_time, grid.n_xprime) {
            return Err(Error::Region("transverse plane shape mismatch".into()));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: Arc<SpaceTimeGrid<T>>, mut f: impl FnMut(T, T) -> Cplx<T>) -> Self {
        let mut values = Array2::zeros((grid.n_time, grid.n_xprime));
        for k in 0..grid.n_time {
            for i in 0..grid.n_xprime {
                values[(k, i)] = f(grid.time(k), grid.xprime(i));
            }
        }
        Self { grid, values }
    }
}

/// Dimension-reduced (one transverse dimension, no axis) evaluation of the
/// bounded estimate on a plane field; the per-axis measure matches the
/// volume evaluators so separable fields factorize against it.
pub fn carleman_sides_transverse<T: Scalar>(
    plane: &TransverseField<T>,
    w: &CarlemanWeights<T>,
    s: T,
    gamma_star: &Subboundary<T>,
) -> Result<CarlemanReport> {
    if s <= T::zero() {
        return Err(Error::Carleman("s must be positive".into()));
    }
    let grid = plane.grid.clone();
    let tab = w.tabulate(&grid)?;
    let v = &plane.values;
    let hx = grid.h_xprime();
    let i_unit = Cplx::new(T::zero(), T::one());
    let two = lit::<T>(2.0);
    let dxp = diff1(v, Axis(1), hx);
    let dt = diff1(v, Axis(0), grid.dt());
    let d2xp = diff2(v, Axis(1), hx);
    // Conjugated plane and its operator images.
    let mut phi = Array2::zeros(v.raw_dim());
    for k in 0..grid.n_time {
        for i in 0..grid.n_xprime {
            phi[(k, i)] = v[(k, i)] * exp_clamped(-s * tab.eta[(k, i)]);
        }
    }
    let dxp_phi = diff1(&phi, Axis(1), hx);
    let dt_phi = diff1(&phi, Axis(0), grid.dt());
    let d2xp_phi = diff2(&phi, Axis(1), hx);
    let mut lhs_grad = T::zero();
    let mut lhs_s3 = T::zero();
    let mut lhs_m1 = T::zero();
    let mut lhs_m2 = T::zero();
    let mut rhs_source = T::zero();
    for k in 0..grid.n_time {
        let wt = grid.time_weight(k);
        for i in 0..grid.n_xprime {
            let cell = wt * grid.xprime_weight(i);
            let ew2 = exp_clamped(-two * s * tab.eta[(k, i)]);
            lhs_grad += cell * ew2 * dxp[(k, i)].norm_sqr();
            lhs_s3 += cell * ew2 * v[(k, i)].norm_sqr();
            let gx = tab.eta_xp[(k, i)];
            let m1 = dt_phi[(k, i)] * i_unit + d2xp_phi[(k, i)] + phi[(k, i)] * (s * s * gx * gx);
            lhs_m1 += cell * m1.norm_sqr();
            let m2 = phi[(k, i)] * Cplx::new(s * tab.eta_xpxp[(k, i)], s * tab.eta_t[(k, i)])
                + dxp_phi[(k, i)] * (two * s * gx);
            lhs_m2 += cell * m2.norm_sqr();
            let l1 = dt[(k, i)] * (-i_unit) - d2xp[(k, i)];
            rhs_source += cell * ew2 * l1.norm_sqr();
        }
    }
    let nx = grid.n_xprime;
    let inv2h = T::one() / (two * hx);
    let mut rhs_boundary = T::zero();
    let mut obs_boundary = T::zero();
    for &side in gamma_star.sides() {
        if w.beta_normal(side) <= T::zero() {
            continue;
        }
        let xp = match side {
            Side::Lo => grid.omega.0,
            Side::Hi => grid.omega.1,
        };
        let bnu = w.beta_normal(side);
        let e0 = exp_clamped(-two * s * w.eta0(xp));
        for k in 0..grid.n_time {
            let d = match side {
                Side::Lo => {
                    (v[(k, 0)] * -lit::<T>(3.0) + v[(k, 1)] * lit::<T>(4.0) - v[(k, 2)]) * inv2h
                }
                Side::Hi => {
                    (v[(k, nx - 1)] * lit::<T>(3.0) - v[(k, nx - 2)] * lit::<T>(4.0)
                        + v[(k, nx - 3)])
                        * inv2h
                }
            };
            let tr2 = (d * side.normal::<T>()).norm_sqr();
            let wt = grid.time_weight(k);
            let ew = exp_clamped(-two * s * tab.eta[(k, side_index_xp(&grid, side))]);
            rhs_boundary += wt * tr2 * ew * w.phi(grid.time(k), xp) * bnu;
            obs_boundary += wt * tr2 * e0;
        }
    }
    let to = |x: T| x.to_f64().unwrap_or(f64::NAN);
    let rep = CarlemanReport {
        s: to(s),
        lhs_grad: to(s * lhs_grad),
        lhs_s3: to(s * s * s * lhs_s3),
        lhs_m1: to(lhs_m1),
        lhs_m2: to(lhs_m2),
        rhs_boundary: to(s * rhs_boundary),
        rhs_source: to(rhs_source),
        obs_boundary: to(s * obs_boundary),
        degenerate: false,
    };
    let degenerate = !(rep.lhs_total().is_finite() && rep.rhs_total().is_finite())
        || rep.rhs_total() <= 0.0;
    Ok(CarlemanReport { degenerate, ..rep })
}

fn side_index_xp<T: Scalar>(grid: &SpaceTimeGrid<T>, side: Side) -> usize {
    match side {
        Side::Lo => 0,
        Side::Hi => grid.n_xprime - 1,
    }
}

/// Default observation boundary for a box subgrid: the positive-slope
/// sides over the whole (truncated) axial range.
pub fn default_gamma_tilde<T: Scalar>(w: &CarlemanWeights<T>) -> Result<Subboundary<T>> {
    let sides: Vec<Side> = Side::BOTH
        .into_iter()
        .filter(|&s| w.beta_normal(s) > T::zero())
        .collect();
    Subboundary::new(sides, AxialExtent::Full)
}

//! Exponential weight family and the conjugated operator pair.
//!
//! The transverse profile is the quadratic `beta_tilde(x') = |x' - x0'|^2`
//! centered outside the closed cross-section, shifted by `K = r * sup
//! beta_tilde` and wrapped into the time-singular weights
//!
//! ```text
//! phi(t,x') = exp(lambda beta) / ((T+t)(T-t)),
//! eta(t,x') = (exp(2 lambda K) - exp(lambda beta)) / ((T+t)(T-t)).
//! ```
//!
//! `M1` (adjoint part) and `M2` (skew-adjoint part) are the two pieces of
//! the conjugation of `-i d/dt - Laplace` by `exp(s eta)`. All weight
//! derivatives are analytic; nothing here is finite-differenced except the
//! field the operators act on.

use ndarray::{Array1, Array2, Axis};
use serde::Serialize;

use crate::domain::{ComplexField, Region, Side, SpaceTimeGrid, Subboundary};
use crate::error::{Error, Result};
use crate::fd::{diff1, diff2};
use crate::scalar::{exp_clamped, lit, Cplx, Scalar};

#[derive(Debug, Clone)]
pub struct CarlemanWeights<T> {
    pub x0_prime: T,
    pub r: T,
    pub lambda: T,
    pub time_halfwidth: T,
    pub omega: (T, T),
    /// `sup |beta_tilde|` over the closed cross-section.
    pub beta_sup: T,
    /// `K = r * beta_sup`.
    pub k_const: T,
}

/// Builds the weight family for a grid's cross-section and time span.
pub fn build_weights<T: Scalar>(
    x0_prime: T,
    r: T,
    lambda: T,
    time_halfwidth: T,
    grid: &SpaceTimeGrid<T>,
) -> Result<CarlemanWeights<T>> {
    let (a, b) = grid.omega;
    if x0_prime >= a && x0_prime <= b {
        return Err(Error::Weights(
            "weight center lies inside the closed cross-section".into(),
        ));
    }
    if r <= T::one() {
        return Err(Error::Weights("weight parameter r must exceed 1".into()));
    }
    if lambda <= T::zero() {
        return Err(Error::Weights("lambda must be positive".into()));
    }
    let beta_sup = ((a - x0_prime) * (a - x0_prime)).max((b - x0_prime) * (b - x0_prime));
    Ok(CarlemanWeights {
        x0_prime,
        r,
        lambda,
        time_halfwidth,
        omega: grid.omega,
        beta_sup,
        k_const: r * beta_sup,
    })
}

impl<T: Scalar> CarlemanWeights<T> {
    pub fn beta_tilde(&self, xp: T) -> T {
        let d = xp - self.x0_prime;
        d * d
    }

    pub fn beta(&self, xp: T) -> T {
        self.beta_tilde(xp) + self.k_const
    }

    fn time_factor(&self, t: T) -> T {
        (self.time_halfwidth + t) * (self.time_halfwidth - t)
    }

    pub fn phi(&self, t: T, xp: T) -> T {
        (self.lambda * self.beta(xp)).exp() / self.time_factor(t)
    }

    fn eta_numerator(&self, xp: T) -> T {
        (lit::<T>(2.0) * self.lambda * self.k_const).exp()
            - (self.lambda * self.beta(xp)).exp()
    }

    pub fn eta(&self, t: T, xp: T) -> T {
        self.eta_numerator(xp) / self.time_factor(t)
    }

    /// `d eta / dt`, analytic.
    pub fn eta_t(&self, t: T, xp: T) -> T {
        let tf = self.time_factor(t);
        self.eta_numerator(xp) * lit::<T>(2.0) * t / (tf * tf)
    }

    /// `d eta / dx'`, analytic.
    pub fn eta_xp(&self, t: T, xp: T) -> T {
        let bp = lit::<T>(2.0) * (xp - self.x0_prime);
        -(self.lambda * bp * (self.lambda * self.beta(xp)).exp()) / self.time_factor(t)
    }

    /// `d^2 eta / dx'^2`, analytic.
    pub fn eta_xpxp(&self, t: T, xp: T) -> T {
        let bp = lit::<T>(2.0) * (xp - self.x0_prime);
        let l = self.lambda;
        -((l * lit::<T>(2.0) + l * l * bp * bp) * (l * self.beta(xp)).exp())
            / self.time_factor(t)
    }

    /// `eta` at `t = 0`, the minimum over the time span.
    pub fn eta0(&self, xp: T) -> T {
        let t2 = self.time_halfwidth * self.time_halfwidth;
        self.eta_numerator(xp) / t2
    }

    /// `exp(-s eta)` with overflow/underflow clamping.
    pub fn weight(&self, s: T, t: T, xp: T) -> T {
        exp_clamped(-s * self.eta(t, xp))
    }

    /// Outward normal derivative of `beta` on a side of the cross-section.
    pub fn beta_normal(&self, side: Side) -> T {
        let xp = match side {
            Side::Lo => self.omega.0,
            Side::Hi => self.omega.1,
        };
        side.normal::<T>() * lit::<T>(2.0) * (xp - self.x0_prime)
    }

    /// Tabulates the weight family on a grid; errors when a node sits at
    /// the singular instants `|t| = T`.
    pub fn tabulate(&self, grid: &SpaceTimeGrid<T>) -> Result<WeightTables<T>> {
        let eps = lit::<T>(1e-12);
        for k in 0..grid.n_time {
            if grid.time(k).abs() >= self.time_halfwidth * (T::one() - eps) {
                return Err(Error::Weights("grid node at singular |t| = T".into()));
            }
        }
        let (nt, nx) = (grid.n_time, grid.n_xprime);
        let mut tab = WeightTables {
            eta: Array2::zeros((nt, nx)),
            eta_t: Array2::zeros((nt, nx)),
            eta_xp: Array2::zeros((nt, nx)),
            eta_xpxp: Array2::zeros((nt, nx)),
            phi: Array2::zeros((nt, nx)),
            eta0: Array1::zeros(nx),
        };
        for i in 0..nx {
            let xp = grid.xprime(i);
            tab.eta0[i] = self.eta0(xp);
            for k in 0..nt {
                let t = grid.time(k);
                tab.eta[(k, i)] = self.eta(t, xp);
                tab.eta_t[(k, i)] = self.eta_t(t, xp);
                tab.eta_xp[(k, i)] = self.eta_xp(t, xp);
                tab.eta_xpxp[(k, i)] = self.eta_xpxp(t, xp);
                tab.phi[(k, i)] = self.phi(t, xp);
            }
        }
        Ok(tab)
    }
}

/// Weight family sampled on one grid's `(t, x')` plane; all entries are
/// constant along the axial index by construction.
#[derive(Debug, Clone)]
pub struct WeightTables<T> {
    pub eta: Array2<T>,
    pub eta_t: Array2<T>,
    pub eta_xp: Array2<T>,
    pub eta_xpxp: Array2<T>,
    pub phi: Array2<T>,
    pub eta0: Array1<T>,
}

/// Admissibility report for the weight profile and an observation side set.
#[derive(Debug, Clone, Serialize)]
pub struct AssumptionReport {
    pub c0: f64,
    pub lambda1: f64,
    pub epsilon: f64,
    pub boundary_signs: BoundarySigns,
    pub gamma_star: Vec<f64>,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundarySigns {
    pub lo: f64,
    pub hi: f64,
}

/// Checks the three weight-profile conditions on a grid.
///
/// In one transverse dimension the Hessian of the quadratic profile is the
/// constant 2, so the quadratic-form condition holds with `epsilon = 2` for
/// every positive `lambda`; the threshold is reported as 0.
pub fn check_assumption<T: Scalar>(
    w: &CarlemanWeights<T>,
    grid: &SpaceTimeGrid<T>,
    gamma_star: &Subboundary<T>,
) -> AssumptionReport {
    let mut c0 = T::infinity();
    for i in 0..grid.n_xprime {
        let g = lit::<T>(2.0) * (grid.xprime(i) - w.x0_prime).abs();
        c0 = c0.min(g);
    }
    let mut pass = c0 > T::zero() && w.lambda > T::zero();
    for side in Side::BOTH {
        if !gamma_star.has_side(side) && w.beta_normal(side) >= T::zero() {
            pass = false;
        }
    }
    let gamma_vals = gamma_star
        .sides()
        .iter()
        .map(|s| match s {
            Side::Lo => w.omega.0.to_f64().unwrap(),
            Side::Hi => w.omega.1.to_f64().unwrap(),
        })
        .collect();
    AssumptionReport {
        c0: c0.to_f64().unwrap(),
        lambda1: 0.0,
        epsilon: 2.0,
        boundary_signs: BoundarySigns {
            lo: w.beta_normal(Side::Lo).to_f64().unwrap(),
            hi: w.beta_normal(Side::Hi).to_f64().unwrap(),
        },
        gamma_star: gamma_vals,
        pass,
    }
}

/// The minimal observation side set the profile admits: every side where
/// the outward normal derivative of `beta` is nonnegative.
pub fn minimal_gamma_star<T: Scalar>(w: &CarlemanWeights<T>) -> Result<Subboundary<T>> {
    let sides: Vec<Side> = Side::BOTH
        .into_iter()
        .filter(|&s| w.beta_normal(s) >= T::zero())
        .collect();
    Subboundary::new(sides, crate::domain::AxialExtent::Full)
}

/// `M1 psi = i d_t psi + Laplace psi + s^2 |grad' eta|^2 psi` (adjoint part).
pub fn apply_m1<T: Scalar>(
    psi: &ComplexField<T>,
    w: &CarlemanWeights<T>,
    s: T,
) -> Result<ComplexField<T>> {
    apply_m1_impl(psi, w, s, true)
}

/// Shared kernel; `include_axial` switches between the cylinder operator
/// (full Laplacian) and its dimension-reduced form (transverse only).
pub(crate) fn apply_m1_impl<T: Scalar>(
    psi: &ComplexField<T>,
    w: &CarlemanWeights<T>,
    s: T,
    include_axial: bool,
) -> Result<ComplexField<T>> {
    if s < T::zero() {
        return Err(Error::Weights("s must be nonnegative".into()));
    }
    if psi.region() != Region::Volume {
        return Err(Error::Region("M1 acts on volume fields".into()));
    }
    let grid = psi.grid().clone();
    let tab = w.tabulate(&grid)?;
    let v = psi.values();
    let i_unit = Cplx::new(T::zero(), T::one());
    let dt = diff1(v, Axis(0), grid.dt());
    let mut out = diff2(v, Axis(1), grid.h_xprime());
    if include_axial {
        out = out + &diff2(v, Axis(2), grid.h_axial());
    }
    for k in 0..grid.n_time {
        for i in 0..grid.n_xprime {
            let gx = tab.eta_xp[(k, i)];
            let mult = s * s * gx * gx;
            for j in 0..grid.n_axial {
                out[(k, i, j)] = out[(k, i, j)] + dt[(k, i, j)] * i_unit + v[(k, i, j)] * mult;
            }
        }
    }
    ComplexField::new(grid, Region::Volume, out)
}

/// `M2 psi = i s eta' psi + 2 s (grad' eta) . grad' psi + s (Lap' eta) psi`
/// (skew-adjoint part).
pub fn apply_m2<T: Scalar>(
    psi: &ComplexField<T>,
    w: &CarlemanWeights<T>,
    s: T,
) -> Result<ComplexField<T>> {
    if s < T::zero() {
        return Err(Error::Weights("s must be nonnegative".into()));
    }
    if psi.region() != Region::Volume {
        return Err(Error::Region("M2 acts on volume fields".into()));
    }
    let grid = psi.grid().clone();
    let tab = w.tabulate(&grid)?;
    let v = psi.values();
    let dxp = diff1(v, Axis(1), grid.h_xprime());
    let mut out = ndarray::Array3::<Cplx<T>>::zeros(v.raw_dim());
    for k in 0..grid.n_time {
        for i in 0..grid.n_xprime {
            let c_eta_t = Cplx::new(T::zero(), s * tab.eta_t[(k, i)]);
            let c_grad = lit::<T>(2.0) * s * tab.eta_xp[(k, i)];
            let c_lap = s * tab.eta_xpxp[(k, i)];
            for j in 0..grid.n_axial {
                out[(k, i, j)] =
                    v[(k, i, j)] * c_eta_t + dxp[(k, i, j)] * c_grad + v[(k, i, j)] * c_lap;
            }
        }
    }
    ComplexField::new(grid, Region::Volume, out)
}

/// Pointwise multiplication by `exp(-s eta)`.
pub fn conjugate_by_weight<T: Scalar>(
    f: &ComplexField<T>,
    w: &CarlemanWeights<T>,
    s: T,
) -> Result<ComplexField<T>> {
    if f.region() != Region::Volume {
        return Err(Error::Region(
            "weight conjugation acts on volume fields".into(),
        ));
    }
    let grid = f.grid().clone();
    let mut out = f.values().clone();
    for k in 0..grid.n_time {
        let t = grid.time(k);
        for i in 0..grid.n_xprime {
            let wv = w.weight(s, t, grid.xprime(i));
            for j in 0..grid.n_axial {
                out[(k, i, j)] = out[(k, i, j)] * wv;
            }
        }
    }
    ComplexField::new(grid, Region::Volume, out)
}

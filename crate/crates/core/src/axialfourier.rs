//! Axial Fourier transform, the unitary group it generates, and the
//! commutation/isometry identities behind the dimension reduction.
//!
//! The truncated axis is treated as a circle of circumference `2X`: the
//! node at `+X` duplicates the node at `-X`, so transforms act on the
//! `n_axial - 1` distinct nodes and the redundant last node is written as
//! a copy of the first. Fields are expected to be negligible near the
//! truncation, which keeps the periodization error below solver error and
//! makes the evolution operator exactly unitary on the discrete side.

use std::sync::Arc;

use ndarray::{Array1, Array3, Axis};
use serde::Serialize;

use crate::domain::{ComplexField, Region, Side, SpaceTimeGrid, Subboundary};
use crate::error::{Error, Result};
use crate::fd::diff1;
use crate::scalar::{lit, Cplx, Scalar};
use crate::weights::{apply_m1_impl, apply_m2, conjugate_by_weight, CarlemanWeights};

/// Axial spectrum of a volume field: complex values indexed `(t, x', m)`
/// where bin `m` carries the frequency `pi * m_signed / X`.
#[derive(Debug, Clone)]
pub struct AxialSpectrum<T> {
    pub grid: Arc<SpaceTimeGrid<T>>,
    /// `(n_time, n_xprime, n_axial - 1)`.
    pub values: Array3<Cplx<T>>,
    pub frequencies: Array1<T>,
}

fn frequencies<T: Scalar>(grid: &SpaceTimeGrid<T>) -> Array1<T> {
    let n = grid.n_axial - 1;
    let base = T::PI() / grid.axial_halfwidth;
    Array1::from_iter((0..n).map(|m| {
        let signed = if m <= n / 2 {
            m as f64
        } else {
            m as f64 - n as f64
        };
        base * lit::<T>(signed)
    }))
}

fn fft_lanes<T: Scalar>(
    values: &mut Array3<Cplx<T>>,
    len: usize,
    forward: bool,
) {
    let mut planner = rustfft::FftPlanner::<T>::new();
    let plan = if forward {
        planner.plan_fft_forward(len)
    } else {
        planner.plan_fft_inverse(len)
    };
    let mut scratch = vec![Cplx::new(T::zero(), T::zero()); plan.get_inplace_scratch_len()];
    for mut lane in values.lanes_mut(Axis(2)) {
        let mut buf: Vec<Cplx<T>> = lane.iter().take(len).copied().collect();
        plan.process_with_scratch(&mut buf, &mut scratch);
        for (dst, src) in lane.iter_mut().zip(buf.iter()) {
            *dst = *src;
        }
    }
}

/// Forward axial transform with unitary normalization and the circle
/// phase convention (spectrum of a field constant in `x_n` sits at `m=0`).
pub fn axial_dft<T: Scalar>(f: &ComplexField<T>) -> Result<AxialSpectrum<T>> {
    if f.region() != Region::Volume {
        return Err(Error::Region("axial transform acts on volume fields".into()));
    }
    let grid = f.grid().clone();
    let n = grid.n_axial - 1;
    let mut values = Array3::zeros((grid.n_time, grid.n_xprime, n));
    for k in 0..grid.n_time {
        for i in 0..grid.n_xprime {
            for m in 0..n {
                values[(k, i, m)] = f.values()[(k, i, m)];
            }
        }
    }
    fft_lanes(&mut values, n, true);
    let scale = T::one() / lit::<T>(n as f64).sqrt();
    let freqs = frequencies(&grid);
    for k in 0..grid.n_time {
        for i in 0..grid.n_xprime {
            for m in 0..n {
                // exp(i k_m X) = (-1)^(m signed); frequencies are integer
                // multiples of pi / X.
                let sign = if (freqs[m] * grid.axial_halfwidth / T::PI())
                    .round()
                    .abs()
                    .rem(lit::<T>(2.0))
                    > lit::<T>(0.5)
                {
                    -T::one()
                } else {
                    T::one()
                };
                values[(k, i, m)] = values[(k, i, m)] * (scale * sign);
            }
        }
    }
    Ok(AxialSpectrum {
        grid,
        values,
        frequencies: freqs,
    })
}

/// Inverse of [`axial_dft`].
pub fn axial_idft<T: Scalar>(spec: &AxialSpectrum<T>) -> Result<ComplexField<T>> {
    let grid = spec.grid.clone();
    let n = grid.n_axial - 1;
    let mut work = spec.values.clone();
    let scale = T::one() / lit::<T>(n as f64).sqrt();
    for k in 0..grid.n_time {
        for i in 0..grid.n_xprime {
            for m in 0..n {
                let sign = if (spec.frequencies[m] * grid.axial_halfwidth / T::PI())
                    .round()
                    .abs()
                    .rem(lit::<T>(2.0))
                    > lit::<T>(0.5)
                {
                    -T::one()
                } else {
                    T::one()
                };
                work[(k, i, m)] = work[(k, i, m)] * (scale * sign);
            }
        }
    }
    fft_lanes(&mut work, n, false);
    let mut out = Array3::zeros((grid.n_time, grid.n_xprime, grid.n_axial));
    for k in 0..grid.n_time {
        for i in 0..grid.n_xprime {
            for j in 0..n {
                out[(k, i, j)] = work[(k, i, j)];
            }
            out[(k, i, grid.n_axial - 1)] = work[(k, i, 0)];
        }
    }
    ComplexField::new(grid, Region::Volume, out)
}

impl<T: Scalar> AxialSpectrum<T> {
    /// Discrete L2 norm in the frequency variable, weighted to match the
    /// axial trapezoid norm (Parseval).
    pub fn norm(&self) -> T {
        let h = self.grid.h_axial();
        let mut acc = T::zero();
        for k in 0..self.grid.n_time {
            let wt = self.grid.time_weight(k);
            for i in 0..self.grid.n_xprime {
                let wx = self.grid.xprime_weight(i);
                for m in 0..self.values.dim().2 {
                    acc += wt * wx * h * self.values[(k, i, m)].norm_sqr();
                }
            }
        }
        acc.sqrt()
    }
}

fn multiplier_evolve_lanes<T: Scalar>(
    values: &mut Array3<Cplx<T>>,
    grid: &SpaceTimeGrid<T>,
    time_of_slice: impl Fn(usize) -> T,
) {
    let n = grid.n_axial - 1;
    let freqs = frequencies(grid);
    let mut planner = rustfft::FftPlanner::<T>::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    let mut scratch =
        vec![Cplx::new(T::zero(), T::zero()); fwd.get_inplace_scratch_len().max(inv.get_inplace_scratch_len())];
    let scale = T::one() / lit::<T>(n as f64);
    let mut buf = vec![Cplx::new(T::zero(), T::zero()); n];
    for k in 0..values.dim().0 {
        let t = time_of_slice(k);
        let mults: Vec<Cplx<T>> = (0..n)
            .map(|m| {
                let phase = t * freqs[m] * freqs[m];
                Cplx::new(phase.cos(), phase.sin())
            })
            .collect();
        for i in 0..values.dim().1 {
            for (m, b) in buf.iter_mut().enumerate() {
                *b = values[(k, i, m)];
            }
            fwd.process_with_scratch(&mut buf, &mut scratch);
            for (m, b) in buf.iter_mut().enumerate() {
                *b = *b * mults[m];
            }
            inv.process_with_scratch(&mut buf, &mut scratch);
            for (m, b) in buf.iter().enumerate() {
                values[(k, i, m)] = *b * scale;
            }
        }
    }
}

/// Applies the axial evolution operator at a fixed time parameter: the
/// spectral multiplier `exp(i t k^2)`, realizing `exp(-i t d^2/dx_n^2)`.
pub fn apply_ut<T: Scalar>(f: &ComplexField<T>, t: T) -> Result<ComplexField<T>> {
    if f.region() != Region::Volume {
        return Err(Error::Region("evolution acts on volume fields".into()));
    }
    let grid = f.grid().clone();
    let n = grid.n_axial - 1;
    let mut values = f.values().clone();
    multiplier_evolve_lanes(&mut values, &grid, |_| t);
    for k in 0..grid.n_time {
        for i in 0..grid.n_xprime {
            values[(k, i, n)] = values[(k, i, 0)];
        }
    }
    ComplexField::new(grid, Region::Volume, values)
}

/// `w(t_k, .) = U_{t_k} v(t_k, .)` for every time node.
pub fn reduce_dimension<T: Scalar>(v: &ComplexField<T>) -> Result<ComplexField<T>> {
    if v.region() != Region::Volume {
        return Err(Error::Region("reduction acts on volume fields".into()));
    }
    let grid = v.grid().clone();
    let n = grid.n_axial - 1;
    let mut values = v.values().clone();
    let g = grid.clone();
    multiplier_evolve_lanes(&mut values, &grid, move |k| g.time(k));
    for k in 0..grid.n_time {
        for i in 0..grid.n_xprime {
            values[(k, i, n)] = values[(k, i, 0)];
        }
    }
    ComplexField::new(grid, Region::Volume, values)
}

/// Spectral second axial derivative (multiplier `-k^2`).
pub fn spectral_axial_second_derivative<T: Scalar>(
    f: &ComplexField<T>,
) -> Result<ComplexField<T>> {
    let spec = axial_dft(f)?;
    let mut spec2 = spec.clone();
    for k in 0..spec2.values.dim().0 {
        for i in 0..spec2.values.dim().1 {
            for m in 0..spec2.values.dim().2 {
                let w = spec.frequencies[m];
                spec2.values[(k, i, m)] = spec2.values[(k, i, m)] * (-w * w);
            }
        }
    }
    axial_idft(&spec2)
}

/// One entry of the residual report.
#[derive(Debug, Clone, Serialize)]
pub struct ResidualEntry {
    pub identity_name: String,
    pub norm_residual: f64,
    pub relative_residual: f64,
    pub tolerance_class: String,
}

fn field_norm<T: Scalar>(f: &ComplexField<T>) -> T {
    crate::domain::l2_norm(f, crate::domain::RegionSel::Full, None).unwrap_or(T::zero())
}

fn entry<T: Scalar>(
    name: &str,
    residual: &ComplexField<T>,
    reference: T,
    class: &str,
) -> ResidualEntry {
    let nr = field_norm(residual).to_f64().unwrap();
    let rf = reference.to_f64().unwrap();
    ResidualEntry {
        identity_name: name.into(),
        norm_residual: nr,
        relative_residual: if rf > 0.0 { nr / rf } else { 0.0 },
        tolerance_class: class.into(),
    }
}

/// Discrete residuals of the commutation identities on a smooth test field.
///
/// Identities that are pure index bookkeeping on the discrete side are
/// tagged `exact` (relative residual at rounding level); identities that
/// discretize a continuum derivative are tagged `second_order` and their
/// residual is expected to shrink at second order under refinement.
pub fn commutator_residuals<T: Scalar>(
    f: &ComplexField<T>,
    w: &CarlemanWeights<T>,
    s: T,
) -> Result<Vec<ResidualEntry>> {
    let grid = f.grid().clone();
    let minus_one = Cplx::new(-T::one(), T::zero());
    let i_unit = Cplx::new(T::zero(), T::one());
    let mut report = Vec::new();

    // (a) time commutator: i d_t (U f) - U (i d_t f) = d2/dxn2 (U f).
    let uf = reduce_dimension(f)?;
    let d_uf = diff1(uf.values(), Axis(0), grid.dt());
    let df = ComplexField::new(
        grid.clone(),
        Region::Volume,
        diff1(f.values(), Axis(0), grid.dt()),
    )?;
    let u_df = reduce_dimension(&df)?;
    let dxx_uf = spectral_axial_second_derivative(&uf)?;
    let mut resid = Array3::zeros(d_uf.raw_dim());
    for ((idx, r), lhs) in resid.indexed_iter_mut().zip(d_uf.iter()) {
        *r = *lhs * i_unit - u_df.values()[idx] * i_unit - dxx_uf.values()[idx];
    }
    let resid = ComplexField::new(grid.clone(), Region::Volume, resid)?;
    report.push(entry(
        "time_commutator",
        &resid,
        field_norm(&dxx_uf).max(field_norm(&u_df)),
        "second_order",
    ));

    // (b) transverse derivative commutes with the axial multiplier.
    let dx_uf = ComplexField::new(
        grid.clone(),
        Region::Volume,
        diff1(uf.values(), Axis(1), grid.h_xprime()),
    )?;
    let dxf = ComplexField::new(
        grid.clone(),
        Region::Volume,
        diff1(f.values(), Axis(1), grid.h_xprime()),
    )?;
    let u_dxf = reduce_dimension(&dxf)?;
    let resid = dx_uf.axpy(minus_one, &u_dxf)?;
    report.push(entry(
        "transverse_commutator",
        &resid,
        field_norm(&u_dxf),
        "exact",
    ));

    // (b') the weight is independent of x_n, so it commutes too.
    let w_uf = conjugate_by_weight(&uf, w, s)?;
    let wf = conjugate_by_weight(f, w, s)?;
    let u_wf = reduce_dimension(&wf)?;
    let resid = w_uf.axpy(minus_one, &u_wf)?;
    report.push(entry("weight_commutator", &resid, field_norm(&u_wf), "exact"));

    // (c) conjugated operators: reduced form on U f versus U of the
    // cylinder form, both applied to the weighted field.
    let m1_red = apply_m1_impl(&u_wf, w, s, false)?;
    let m1_cyl = apply_m1_impl(&wf, w, s, true)?;
    let u_m1 = reduce_dimension(&m1_cyl)?;
    let resid = m1_red.axpy(minus_one, &u_m1)?;
    report.push(entry(
        "conjugated_m1",
        &resid,
        field_norm(&u_m1),
        "second_order",
    ));
    let m2_red = apply_m2(&u_wf, w, s)?;
    let m2_cyl = apply_m2(&wf, w, s)?;
    let u_m2 = reduce_dimension(&m2_cyl)?;
    let resid = m2_red.axpy(minus_one, &u_m2)?;
    report.push(entry("conjugated_m2", &resid, field_norm(&u_m2), "exact"));

    // (d) boundary weight commutes with the evolution on the trace level.
    let gamma = Subboundary::new(vec![Side::Hi], crate::domain::AxialExtent::Full)?;
    let tr_uf = crate::domain::neumann_trace(&uf, &gamma)?;
    let tr_f = crate::domain::neumann_trace(f, &gamma)?;
    let weight_trace = |tr: &ComplexField<T>| -> Result<ComplexField<T>> {
        let mut vals = tr.values().clone();
        let bnorm = w.beta_normal(Side::Hi).max(T::zero()).sqrt();
        for k in 0..grid.n_time {
            let t = grid.time(k);
            let xp = grid.omega.1;
            let wv = w.weight(s, t, xp) * w.phi(t, xp).sqrt() * bnorm;
            for j in 0..grid.n_axial {
                vals[(k, 1, j)] = vals[(k, 1, j)] * wv;
            }
        }
        ComplexField::new(grid.clone(), Region::Lateral, vals)
    };
    let lhs = weight_trace(&tr_uf)?;
    let rhs = evolve_lateral_slicewise(&weight_trace(&tr_f)?)?;
    let resid = lhs.axpy(minus_one, &rhs)?;
    report.push(entry(
        "trace_weight_commutator",
        &resid,
        field_norm(&rhs),
        "exact",
    ));
    Ok(report)
}

/// Applies the slice-wise evolution along the axial lanes of a lateral
/// trace field.
pub fn evolve_lateral_slicewise<T: Scalar>(tr: &ComplexField<T>) -> Result<ComplexField<T>> {
    if tr.region() != Region::Lateral {
        return Err(Error::Region("expected a lateral trace".into()));
    }
    let grid = tr.grid().clone();
    let n = grid.n_axial - 1;
    let mut values = tr.values().clone();
    let g = grid.clone();
    multiplier_evolve_lanes(&mut values, &grid, move |k| g.time(k));
    for k in 0..grid.n_time {
        for side in 0..2 {
            values[(k, side, n)] = values[(k, side, 0)];
        }
    }
    ComplexField::new(grid, Region::Lateral, values)
}

/// Norms before/after the slice-wise evolution of a boundary trace series;
/// the two agree because the multiplier is unimodular.
pub fn isometry_boundary<T: Scalar>(trace: &ComplexField<T>) -> Result<(T, T)> {
    let evolved = evolve_lateral_slicewise(trace)?;
    Ok((field_norm(&evolved), field_norm(trace)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{make_grid, GridConfig, TimeAxis};
    use crate::weights::build_weights;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn grid(nt: usize, nx: usize, na: usize) -> Arc<SpaceTimeGrid<f64>> {
        Arc::new(
            make_grid(&GridConfig {
                omega: (0.0, 1.0),
                axial_halfwidth: 4.0,
                time_halfwidth: 1.0,
                support_halfwidth: 1.5,
                n_xprime: nx,
                n_axial: na,
                n_time: nt,
                time_axis: TimeAxis::Symmetric,
            })
            .unwrap(),
        )
    }

    fn random_periodic_field(g: &Arc<SpaceTimeGrid<f64>>, seed: u64) -> ComplexField<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let modes: Vec<(f64, f64, i32, f64)> = (0..5)
            .map(|_| {
                (
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-3..4),
                    rng.gen_range(0.5..2.5),
                )
            })
            .collect();
        let x = g.axial_halfwidth;
        ComplexField::from_fn(g.clone(), move |t, xp, xn| {
            let mut z = Cplx::new(0.0, 0.0);
            for &(a, b, m, fx) in &modes {
                let ax = PI * (m as f64) * xn / x;
                z += Cplx::new(a * ax.cos(), b * ax.sin()) * (fx * xp).sin() * (1.0 + 0.3 * t);
            }
            z
        })
    }

    #[test]
    fn constant_field_spectrum_at_zero() {
        let g = grid(4, 5, 17);
        let f = ComplexField::from_fn(g.clone(), |_, xp, _| Cplx::new(1.0 + xp, 0.5));
        let spec = axial_dft(&f).unwrap();
        for k in 0..g.n_time {
            for i in 0..g.n_xprime {
                for m in 1..spec.values.dim().2 {
                    assert!(spec.values[(k, i, m)].norm() < 1e-13);
                }
                assert!(spec.values[(k, i, 0)].norm() > 0.1);
            }
        }
    }

    #[test]
    fn round_trip_and_parseval() {
        let g = grid(5, 7, 33);
        let f = random_periodic_field(&g, 7);
        let spec = axial_dft(&f).unwrap();
        let back = axial_idft(&spec).unwrap();
        let diff = f.axpy(Cplx::new(-1.0, 0.0), &back).unwrap();
        assert!(diff.max_abs() < 1e-13 * f.max_abs().max(1.0));
        let nx = crate::domain::l2_norm(&f, crate::domain::RegionSel::Full, None).unwrap();
        let nk = spec.norm();
        assert!((nx - nk).abs() / nx < 1e-12, "{nx} vs {nk}");
    }

    #[test]
    fn single_mode_multiplier_exact() {
        let g = grid(4, 5, 33);
        let x = g.axial_halfwidth;
        let m = 3.0;
        let kappa = PI * m / x;
        let f = ComplexField::from_fn(g.clone(), |_, xp, xn| {
            Cplx::new(0.0, kappa * xn).exp() * (2.0 * xp).sin()
        });
        let t = 0.37;
        let uf = apply_ut(&f, t).unwrap();
        let phase = Cplx::new(0.0, t * kappa * kappa).exp();
        let want = f.values().mapv(|z| z * phase);
        let err = (&want - uf.values()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(err < 1e-12, "err={err}");
    }

    #[test]
    fn identity_at_zero_and_unitarity() {
        let g = grid(4, 5, 33);
        let f = random_periodic_field(&g, 11);
        let u0 = apply_ut(&f, 0.0).unwrap();
        let diff = f.axpy(Cplx::new(-1.0, 0.0), &u0).unwrap();
        assert!(diff.max_abs() < 1e-13 * f.max_abs());
        let ut = apply_ut(&f, 1.3).unwrap();
        let n0 = crate::domain::l2_norm(&f, crate::domain::RegionSel::Full, None).unwrap();
        let n1 = crate::domain::l2_norm(&ut, crate::domain::RegionSel::Full, None).unwrap();
        assert!((n0 - n1).abs() / n0 < 1e-12);
    }

    #[test]
    fn xn_independent_field_fixed_by_reduction() {
        let g = grid(4, 5, 17);
        let f = ComplexField::from_fn(g.clone(), |t, xp, _| Cplx::new(t * xp, xp));
        let w = reduce_dimension(&f).unwrap();
        let diff = f.axpy(Cplx::new(-1.0, 0.0), &w).unwrap();
        assert!(diff.max_abs() < 1e-12 * f.max_abs());
    }

    #[test]
    fn exact_class_residuals_at_rounding_level() {
        let g = grid(8, 9, 33);
        let w = build_weights(-0.5, 2.0, 0.1, 1.0, &g).unwrap();
        let f = random_periodic_field(&g, 3);
        let report = commutator_residuals(&f, &w, 4.0).unwrap();
        for e in &report {
            if e.tolerance_class == "exact" {
                assert!(
                    e.relative_residual < 1e-12,
                    "{}: {}",
                    e.identity_name,
                    e.relative_residual
                );
            }
        }
    }

    #[test]
    fn time_commutator_residual_is_time_discretization_only() {
        // Single axial mode with its exact phase evolution: the residual of
        // the time-commutator identity is pure d_t discretization error.
        let errs: Vec<f64> = [9usize, 17, 33]
            .iter()
            .map(|&nt| {
                let g = grid(nt, 5, 33);
                let x = g.axial_halfwidth;
                let kappa = 2.0 * PI / x;
                let f = ComplexField::from_fn(g.clone(), |t, xp, xn| {
                    Cplx::new(0.0, kappa * xn - kappa * kappa * t).exp() * (1.5 * xp).sin()
                });
                let w = build_weights(-0.5, 2.0, 0.1, 1.0, &g).unwrap();
                let rep = commutator_residuals(&f, &w, 0.0).unwrap();
                rep.iter()
                    .find(|e| e.identity_name == "time_commutator")
                    .unwrap()
                    .relative_residual
            })
            .collect();
        let p1 = (errs[0] / errs[1]).log2();
        let p2 = (errs[1] / errs[2]).log2();
        assert!(
            (1.6..2.4).contains(&p1) && (1.6..2.4).contains(&p2),
            "orders {p1} {p2} ({errs:?})"
        );
    }

    #[test]
    fn boundary_isometry() {
        let g = grid(6, 5, 33);
        let f = random_periodic_field(&g, 21);
        let tr = crate::domain::neumann_trace(&f, &Subboundary::full_lateral()).unwrap();
        let (a, b) = isometry_boundary(&tr).unwrap();
        assert!((a - b).abs() / b.max(1e-30) < 1e-12);
        let zero =
            ComplexField::zeros(g, Region::Lateral);
        let (a0, b0) = isometry_boundary(&zero).unwrap();
        assert_eq!((a0, b0), (0.0, 0.0));
    }
}

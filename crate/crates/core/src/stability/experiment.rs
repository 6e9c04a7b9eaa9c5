//! One end-to-end two-potential experiment and the seeded family runner.

use std::sync::Arc;

use ndarray::{Array2, Axis};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::carleman::{
    apply_cutoff, carleman_sides_bounded, commutator_kv, default_gamma_tilde, extract_obox,
    j_direct, obs_functional, weighted_dq_norm_sq, CutoffChi,
};
use crate::domain::{
    l2_norm, make_grid, neumann_trace, AxialExtent, ComplexField, GridConfig, Region,
    RegionSel, SpaceTimeGrid, Subboundary, TimeAxis,
};
use crate::error::{Error, Result};
use crate::fd::diff1;
use crate::forward::{difference_system, symmetrize_time, InitialState, Potential};
use crate::scalar::{lit, Cplx, Scalar};
use crate::weights::{build_weights, check_assumption, minimal_gamma_star, CarlemanWeights};

use super::sampling::{
    rasterize_init, rasterize_pair, sample_init_spec, sample_pair_spec, InitSpec, PairSpec,
};

/// Parameters of one experiment family.
#[derive(Debug, Clone)]
pub struct ExperimentConfig<T> {
    pub omega: (T, T),
    pub axial_halfwidth: T,
    pub time_halfwidth: T,
    pub ell: T,
    pub big_l: T,
    pub alpha: T,
    pub m_bound: T,
    pub background: T,
    pub n_xprime: usize,
    pub n_axial: usize,
    pub n_time: usize,
    pub x0_prime: T,
    pub weight_r: T,
    pub lambda: T,
    pub s_audit: T,
    pub amplitude: T,
    pub family_size: usize,
    pub seed: u64,
}

impl<T: Scalar> ExperimentConfig<T> {
    /// Desk-scale defaults; the short time span keeps dispersive tails
    /// away from the axial truncation.
    pub fn default_desk() -> Self {
        Self {
            omega: (lit(0.0), lit(1.0)),
            axial_halfwidth: lit(4.0),
            time_halfwidth: lit(0.25),
            ell: lit(0.75),
            big_l: lit(1.5),
            alpha: lit(1.0),
            m_bound: lit(50.0),
            background: lit(0.0),
            n_xprime: 33,
            n_axial: 129,
            n_time: 65,
            x0_prime: lit(-0.5),
            weight_r: lit(2.0),
            lambda: lit(0.1),
            s_audit: lit(5.0),
            amplitude: lit(0.5),
            family_size: 20,
            seed: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.big_l > self.ell && self.ell > T::zero()) {
            return Err(Error::Config("need L > ell > 0".into()));
        }
        if self.alpha <= T::zero() {
            return Err(Error::Config("need alpha > 0".into()));
        }
        if self.axial_halfwidth <= self.big_l {
            return Err(Error::Config("need X > L".into()));
        }
        Ok(())
    }

    pub fn forward_grid(&self) -> Result<Arc<SpaceTimeGrid<T>>> {
        Ok(Arc::new(make_grid(&self.grid_config(TimeAxis::Forward))?))
    }

    pub fn symmetric_grid(&self) -> Result<Arc<SpaceTimeGrid<T>>> {
        Ok(Arc::new(make_grid(&self.grid_config(TimeAxis::Symmetric))?))
    }

    pub fn grid_config(&self, axis: TimeAxis) -> GridConfig<T> {
        GridConfig {
            omega: self.omega,
            axial_halfwidth: self.axial_halfwidth,
            time_halfwidth: self.time_halfwidth,
            support_halfwidth: self.big_l,
            n_xprime: self.n_xprime,
            n_axial: self.n_axial,
            n_time: self.n_time,
            time_axis: axis,
        }
    }

    /// Same physics with the axial truncation (and node count) doubled.
    pub fn doubled_x(&self) -> Self {
        let mut c = self.clone();
        c.axial_halfwidth = self.axial_halfwidth * lit::<T>(2.0);
        c.n_axial = 2 * self.n_axial - 1;
        c
    }

    pub fn weights_on(&self, grid: &SpaceTimeGrid<T>) -> Result<CarlemanWeights<T>> {
        build_weights(
            self.x0_prime,
            self.weight_r,
            self.lambda,
            self.time_halfwidth,
            grid,
        )
    }
}

/// Everything measured in one experiment.
#[derive(Debug, Clone, Serialize)]
pub struct StabilityOutcome {
    pub seed: u64,
    pub lhs: f64,
    pub rhs_eq1a_neumann: f64,
    pub rhs_eq1a_volume: f64,
    pub rhs_eqa2: f64,
    pub ratio_eq1a: Option<f64>,
    pub ratio_eqa2: Option<f64>,
    pub sup_u2: f64,
    pub sup_u2prime: f64,
    /// Relative gap between the one-sided time derivative of `u1 - u2` at
    /// `t = 0` and the initial value the linearized system prescribes.
    pub closure_gap: f64,
    pub j: f64,
    pub i_w: f64,
    pub obs: f64,
    pub s: f64,
    pub c_exp: Option<f64>,
    pub alpha_factor: Option<f64>,
}

fn spatial_l2<T: Scalar>(dq: &Array2<T>, grid: &SpaceTimeGrid<T>) -> T {
    let mut acc = T::zero();
    for i in 0..grid.n_xprime {
        for j in 0..grid.n_axial {
            acc += grid.xprime_weight(i) * grid.axial_weight(j) * dq[(i, j)] * dq[(i, j)];
        }
    }
    acc.sqrt()
}

/// `H^1(time; H^1(space))` surrogate over the band `ell <= |x_n| <= L`.
fn h1_time_h1_space_band<T: Scalar>(u: &ComplexField<T>, lo: T, hi: T) -> T {
    let grid = u.grid();
    let v = u.values();
    let dt = diff1(v, Axis(0), grid.dt());
    let dx = diff1(v, Axis(1), grid.h_xprime());
    let da = diff1(v, Axis(2), grid.h_axial());
    let dtx = diff1(&dx, Axis(0), grid.dt());
    let dta = diff1(&da, Axis(0), grid.dt());
    let mut acc = T::zero();
    for j in 0..grid.n_axial {
        let a = grid.axial(j).abs();
        if a < lo || a > hi {
            continue;
        }
        for k in 0..grid.n_time {
            let wt = grid.time_weight(k);
            for i in 0..grid.n_xprime {
                let cell = wt * grid.xprime_weight(i) * grid.axial_weight(j);
                acc += cell
                    * (v[(k, i, j)].norm_sqr()
                        + dt[(k, i, j)].norm_sqr()
                        + dx[(k, i, j)].norm_sqr()
                        + da[(k, i, j)].norm_sqr()
                        + dtx[(k, i, j)].norm_sqr()
                        + dta[(k, i, j)].norm_sqr());
            }
        }
    }
    acc.sqrt()
}

fn sup_abs<T: Scalar>(f: &ComplexField<T>) -> T {
    f.max_abs()
}

/// Runs the full pipeline for one rasterized pair and initial state.
pub fn run_stability<T: Scalar>(
    cfg: &ExperimentConfig<T>,
    q1: &Potential<T>,
    q2: &Potential<T>,
    u0: &InitialState<T>,
    seed: u64,
) -> Result<StabilityOutcome> {
    cfg.validate()?;
    let grid_fwd = cfg.forward_grid()?;
    let grid_sym = cfg.symmetric_grid()?;
    let weights = cfg.weights_on(&grid_sym)?;
    let gamma_star = minimal_gamma_star(&weights)?;
    let assumption = check_assumption(&weights, &grid_sym, &gamma_star);
    if !assumption.pass {
        return Err(Error::Weights("weight profile fails admissibility".into()));
    }
    let d = difference_system(q1, q2, u0, &grid_fwd)?;

    let dq = &q1.values - &q2.values;
    let lhs = spatial_l2(&dq, &grid_fwd);

    let chi = CutoffChi::new(cfg.ell, cfg.big_l)?;
    let gamma_star_band = Subboundary::new(
        gamma_star.sides().to_vec(),
        AxialExtent::Interval(-chi.r_mid, chi.r_mid),
    )?;
    let tr_band = neumann_trace(&d.v, &gamma_star_band)?;
    let rhs_neumann = l2_norm(&tr_band, RegionSel::Full, None)?;
    let tr_full = neumann_trace(&d.v, &gamma_star)?;
    let rhs_eqa2 = l2_norm(&tr_full, RegionSel::Full, None)?;
    let rhs_volume = h1_time_h1_space_band(&d.u, cfg.ell, cfg.big_l);

    // Linearized closure: the one-sided time derivative of u at t = 0
    // against i (q2 - q1) u0.
    let closure_gap = {
        let grid = &grid_fwd;
        let uvals = d.u.values();
        let two_dt = lit::<T>(2.0) * grid.dt();
        let mut num = T::zero();
        let mut den = T::zero();
        for i in 0..grid.n_xprime {
            for j in 0..grid.n_axial {
                let fd = (uvals[(1, i, j)] * lit::<T>(4.0) - uvals[(2, i, j)]) / two_dt;
                let want = Cplx::new(
                    T::zero(),
                    (q2.values[(i, j)] - q1.values[(i, j)]) * u0.values[(i, j)],
                );
                let w = grid.xprime_weight(i) * grid.axial_weight(j);
                num += w * (fd - want).norm_sqr();
                den += w * want.norm_sqr();
            }
        }
        if den > T::zero() {
            (num / den).sqrt().to_f64().unwrap_or(f64::NAN)
        } else {
            num.sqrt().to_f64().unwrap_or(f64::NAN)
        }
    };

    // Weighted audit on the symmetric span.
    let v_sym = symmetrize_time(&d.v, &grid_sym)?;
    let f_sym = symmetrize_time(&d.f_prime, &grid_sym)?;
    let w_full = apply_cutoff(&v_sym, &chi)?;
    let kv = commutator_kv(&v_sym, &chi)?;
    let chif = apply_cutoff(&f_sym, &chi)?;
    // Operator image of the cutoff field: chi f' - K v - q1 (chi v).
    let mut src_vals = chif.into_values();
    for k in 0..grid_sym.n_time {
        for i in 0..grid_sym.n_xprime {
            for j in 0..grid_sym.n_axial {
                src_vals[(k, i, j)] = src_vals[(k, i, j)]
                    - kv.values()[(k, i, j)]
                    - w_full.values()[(k, i, j)] * q1.values[(i, j)];
            }
        }
    }
    let src_full = ComplexField::new(grid_sym.clone(), Region::Volume, src_vals)?;
    let l_o = (chi.r_mid + cfg.big_l) * lit::<T>(0.5);
    let w_box = extract_obox(&w_full, l_o, chi.r_mid)?;
    let src_box = extract_obox(&src_full, l_o, chi.r_mid)?;
    let s = cfg.s_audit;
    let gamma_tilde = default_gamma_tilde(&weights)?;
    let rep = carleman_sides_bounded(&w_box, Some(&src_box), &weights, s, &gamma_tilde)?;
    let j = j_direct(&w_box, &weights, s).map(|v| v.to_f64().unwrap())?;
    let obs = obs_functional(rep.obs_boundary, &v_sym, &weights, s, (cfg.ell, chi.r_mid))?;
    let dq2 = weighted_dq_norm_sq(&dq, &grid_fwd, &weights, s, cfg.ell)
        .to_f64()
        .unwrap();
    let s64 = s.to_f64().unwrap();
    let denom = obs.total + dq2;
    let c_exp = if denom > 0.0 && j > 0.0 {
        Some(s64.powf(1.5) * j / denom)
    } else {
        None
    };
    let alpha64 = cfg.alpha.to_f64().unwrap();
    let alpha_factor = c_exp.map(|c| alpha64 * alpha64 - c * s64.powf(-1.5));

    let to = |x: T| x.to_f64().unwrap_or(f64::NAN);
    let lhs64 = to(lhs);
    let rhs1 = to(rhs_neumann) + to(rhs_volume);
    let rhs2 = to(rhs_eqa2);
    Ok(StabilityOutcome {
        seed,
        lhs: lhs64,
        rhs_eq1a_neumann: to(rhs_neumann),
        rhs_eq1a_volume: to(rhs_volume),
        rhs_eqa2: rhs2,
        ratio_eq1a: if rhs1 > 0.0 { Some(lhs64 / rhs1) } else { None },
        ratio_eqa2: if rhs2 > 0.0 { Some(lhs64 / rhs2) } else { None },
        sup_u2: to(sup_abs(&d.u2)),
        sup_u2prime: to(sup_abs(&d.u2_prime)),
        closure_gap,
        j,
        i_w: rep.lhs_total(),
        obs: obs.total,
        s: s64,
        c_exp,
        alpha_factor,
    })
}

/// Draws and runs one seeded experiment.
pub fn run_seeded<T: Scalar>(
    cfg: &ExperimentConfig<T>,
    seed: u64,
) -> Result<(PairSpec, InitSpec, StabilityOutcome)> {
    let mut rng = ChaCha8Rng::seed_from_u64(
        cfg.seed ^ seed.wrapping_mul(0x9E37_79B9_7F4A_7C15),
    );
    let pair = sample_pair_spec(cfg, &mut rng);
    let init = sample_init_spec(cfg, &mut rng);
    let grid = cfg.forward_grid()?;
    let (q1, q2) = rasterize_pair(&pair, cfg, &grid)?;
    let u0 = rasterize_init(&init, cfg, &grid)?;
    let outcome = run_stability(cfg, &q1, &q2, &u0, seed)?;
    Ok((pair, init, outcome))
}

/// Runs the whole family concurrently (deterministic order).
pub fn run_family<T: Scalar>(cfg: &ExperimentConfig<T>) -> Result<Vec<StabilityOutcome>> {
    let seeds: Vec<u64> = (0..cfg.family_size as u64).collect();
    let results: Vec<Result<StabilityOutcome>> = seeds
        .par_iter()
        .map(|&s| run_seeded(cfg, s).map(|(_, _, o)| o))
        .collect();
    results.into_iter().collect()
}

/// Scales the pair difference: `q1 -> q2 + eps (q1 - q2)` on the spec level.
pub fn scale_difference(spec: &PairSpec, eps: f64) -> PairSpec {
    let mut bumps_q1: Vec<_> = spec.bumps_q2.clone();
    for b in &spec.bumps_q1 {
        let mut b = b.clone();
        b.amplitude *= eps;
        bumps_q1.push(b);
    }
    for b in &spec.bumps_q2 {
        let mut b = b.clone();
        b.amplitude *= -eps;
        bumps_q1.push(b);
    }
    PairSpec {
        bumps_q1,
        bumps_q2: spec.bumps_q2.clone(),
        scale: spec.scale,
    }
}

//! Seeded samplers for admissible potential pairs and initial states.
//!
//! Samples are parameter specs, not arrays: experiments re-rasterize the
//! same spec on different grids (refinements, doubled truncation) without
//! touching the random stream.

use ndarray::Array2;
use rand::Rng;

use crate::domain::SpaceTimeGrid;
use crate::error::{Error, Result};
use crate::forward::{w2inf_surrogate, InitialState, Potential};
use crate::scalar::{lit, Scalar};

use super::ExperimentConfig;

/// Smooth transition: 0 at `u <= 0`, 1 at `u >= 1`, C-infinity between.
pub fn smooth_step(u: f64) -> f64 {
    let f = |x: f64| if x > 0.0 { (-1.0 / x).exp() } else { 0.0 };
    let a = f(u);
    let b = f(1.0 - u);
    a / (a + b)
}

/// C-infinity bump on `(-1, 1)`, peak value 1.
pub fn smooth_bump(u: f64) -> f64 {
    if u.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - u * u)).exp()
    }
}

/// Plateau in the axial variable: 1 on `|x| <= inner`, 0 on `|x| >= outer`.
pub fn plateau(x: f64, inner: f64, outer: f64) -> f64 {
    smooth_step((outer - x.abs()) / (outer - inner))
}

/// One separable perturbation bump: transverse `sin^3` harmonic (vanishing
/// with two derivatives on the walls) times a compact axial bump.
#[derive(Debug, Clone)]
pub struct BumpSpec {
    pub amplitude: f64,
    pub transverse_mode: usize,
    pub axial_center: f64,
    pub axial_width: f64,
}

/// Spec of one admissible pair: two bump sums sharing the support radius,
/// plus the post-hoc scales keeping the surrogate under the bound.
#[derive(Debug, Clone)]
pub struct PairSpec {
    pub bumps_q1: Vec<BumpSpec>,
    pub bumps_q2: Vec<BumpSpec>,
    pub scale: f64,
}

impl PairSpec {
    /// The difference field `q1 - q2` at a point, before background.
    pub fn delta(&self, xp_hat: f64, xn: f64) -> f64 {
        eval_bumps(&self.bumps_q1, xp_hat, xn) - eval_bumps(&self.bumps_q2, xp_hat, xn)
    }
}

fn eval_bumps(bumps: &[BumpSpec], xp_hat: f64, xn: f64) -> f64 {
    bumps
        .iter()
        .map(|b| {
            let s = (std::f64::consts::PI * b.transverse_mode as f64 * xp_hat).sin();
            b.amplitude * s * s * s * smooth_bump((xn - b.axial_center) / b.axial_width)
        })
        .sum()
}

/// Spec of one initial state: plateau floor at `alpha` plus a positive
/// axial bump, with a nonnegative transverse modulation.
#[derive(Debug, Clone)]
pub struct InitSpec {
    pub alpha: f64,
    pub bump_amp: f64,
    pub bump_center: f64,
    pub bump_width: f64,
    pub mod_amp: f64,
    pub mod_mode: usize,
    pub plateau_inner: f64,
    pub plateau_outer: f64,
}

/// Draws an admissible pair spec.
pub fn sample_pair_spec<T: Scalar>(
    cfg: &ExperimentConfig<T>,
    rng: &mut impl Rng,
) -> PairSpec {
    let ell = cfg.ell.to_f64().unwrap();
    let amp = cfg.amplitude.to_f64().unwrap();
    let mut draw = |rng: &mut dyn rand::RngCore| -> Vec<BumpSpec> {
        let count = 2;
        (0..count)
            .map(|_| {
                let width = rng.gen_range(0.3..0.45) * ell;
                let max_c = (ell - width) * 0.9;
                BumpSpec {
                    amplitude: amp * rng.gen_range(0.4..1.0)
                        * if rng.gen_bool(0.5) { 1.0 } else { -1.0 },
                    transverse_mode: rng.gen_range(1..3),
                    axial_center: rng.gen_range(-max_c..max_c),
                    axial_width: width,
                }
            })
            .collect()
    };
    PairSpec {
        bumps_q1: draw(rng),
        bumps_q2: draw(rng),
        scale: 1.0,
    }
}

/// Rasterizes one side of a pair onto a grid, rescaling to honor the
/// surrogate bound.
pub fn rasterize_potential<T: Scalar>(
    bumps: &[BumpSpec],
    scale: f64,
    cfg: &ExperimentConfig<T>,
    grid: &SpaceTimeGrid<T>,
) -> Result<Potential<T>> {
    let background = Array2::from_elem(
        (grid.n_xprime, grid.n_axial),
        cfg.background,
    );
    if w2inf_surrogate(&background, grid) >= cfg.m_bound {
        return Err(Error::Admissibility(
            "bound leaves no room above the background; perturbation forced to zero".into(),
        ));
    }
    let (a, b) = grid.omega;
    let width = b - a;
    let mut delta = Array2::zeros((grid.n_xprime, grid.n_axial));
    for i in 0..grid.n_xprime {
        let xp_hat = ((grid.xprime(i) - a) / width).to_f64().unwrap();
        for j in 0..grid.n_axial {
            let xn = grid.axial(j).to_f64().unwrap();
            delta[(i, j)] = lit::<T>(scale * eval_bumps(bumps, xp_hat, xn));
        }
    }
    let headroom = cfg.m_bound - w2inf_surrogate(&background, grid);
    let dnorm = w2inf_surrogate(&delta, grid);
    let mut q = background.clone() + &delta;
    if w2inf_surrogate(&q, grid) > cfg.m_bound {
        let shrink = headroom / (dnorm + lit::<T>(1e-30)) * lit::<T>(0.99);
        q = background + &delta.mapv(|v| v * shrink);
    }
    Potential::new(q, Array2::from_elem((grid.n_xprime, grid.n_axial), cfg.background), cfg.m_bound, cfg.ell, grid)
}

/// Rasterizes the admissible pair.
pub fn rasterize_pair<T: Scalar>(
    spec: &PairSpec,
    cfg: &ExperimentConfig<T>,
    grid: &SpaceTimeGrid<T>,
) -> Result<(Potential<T>, Potential<T>)> {
    let q1 = rasterize_potential(&spec.bumps_q1, spec.scale, cfg, grid)?;
    let q2 = rasterize_potential(&spec.bumps_q2, spec.scale, cfg, grid)?;
    q1.check_pair(&q2, grid)?;
    Ok((q1, q2))
}

/// Draws an initial-state spec.
pub fn sample_init_spec<T: Scalar>(cfg: &ExperimentConfig<T>, rng: &mut impl Rng) -> InitSpec {
    let ell = cfg.ell.to_f64().unwrap();
    let big_l = cfg.big_l.to_f64().unwrap();
    let alpha = cfg.alpha.to_f64().unwrap();
    let width = rng.gen_range(0.35..0.5) * ell;
    InitSpec {
        alpha,
        bump_amp: alpha * rng.gen_range(0.2..0.6),
        bump_center: rng.gen_range(-0.3..0.3) * ell,
        bump_width: width,
        mod_amp: rng.gen_range(0.05..0.3),
        mod_mode: rng.gen_range(1..3),
        plateau_inner: ell,
        plateau_outer: (ell + big_l) * 0.5,
    }
}

/// Rasterizes an initial-state spec onto a grid.
pub fn rasterize_init<T: Scalar>(
    spec: &InitSpec,
    cfg: &ExperimentConfig<T>,
    grid: &SpaceTimeGrid<T>,
) -> Result<InitialState<T>> {
    let (a, b) = grid.omega;
    let width = b - a;
    let mut u0 = Array2::zeros((grid.n_xprime, grid.n_axial));
    for i in 0..grid.n_xprime {
        let xp_hat = ((grid.xprime(i) - a) / width).to_f64().unwrap();
        let m = (std::f64::consts::PI * spec.mod_mode as f64 * xp_hat).sin();
        let modulation = 1.0 + spec.mod_amp * m * m;
        for j in 0..grid.n_axial {
            let xn = grid.axial(j).to_f64().unwrap();
            let core = spec.alpha * plateau(xn, spec.plateau_inner, spec.plateau_outer)
                + spec.bump_amp * smooth_bump((xn - spec.bump_center) / spec.bump_width);
            u0[(i, j)] = lit::<T>(core * modulation);
        }
    }
    InitialState::new(u0, cfg.alpha, cfg.ell, grid)
}

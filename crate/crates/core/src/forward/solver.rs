//! Crank-Nicolson time stepping for the potential Schrodinger equation on
//! the truncated waveguide: Dirichlet data on the lateral walls, homogeneous
//! Dirichlet at the axial truncation ends. One banded complex factorization
//! per solve, reused across all steps.

use std::sync::Arc;

use ndarray::{Array2, Array3, Axis};

use crate::domain::{ComplexField, Region, SpaceTimeGrid, TimeAxis};
use crate::error::{Error, Result};
use crate::fd::{diff1, diff2};
use crate::linalg::{BandedLu, BandedMatrix};
use crate::scalar::{lit, Cplx, Scalar};

use super::potential::{InitialState, Potential};

/// Lateral Dirichlet data: complex values indexed `(t, side, x_n)`.
pub type LateralData<T> = Array3<Cplx<T>>;

/// `g(t, wall) = u0 + i t (Lap - p) u0` evaluated on the lateral walls with
/// boundary-adapted second-order stencils.
pub fn boundary_data_g<T: Scalar>(
    u0: &InitialState<T>,
    background: &Array2<T>,
    grid: &SpaceTimeGrid<T>,
) -> LateralData<T> {
    let rate = boundary_rate(u0, background, grid);
    let (nt, na) = (grid.n_time, grid.n_axial);
    let nx = grid.n_xprime;
    let mut g = Array3::zeros((nt, 2, na));
    for k in 0..nt {
        let t = grid.time(k);
        for j in 0..na {
            for (side, i) in [(0usize, 0usize), (1, nx - 1)] {
                let base = Cplx::new(u0.values[(i, j)], T::zero());
                g[(k, side, j)] = base + rate[(side, j)] * t;
            }
        }
    }
    g
}

/// The time-independent rate `i (Lap - p) u0` on the walls; this is also
/// the Dirichlet data of the time-differentiated system.
pub fn boundary_rate<T: Scalar>(
    u0: &InitialState<T>,
    background: &Array2<T>,
    grid: &SpaceTimeGrid<T>,
) -> Array2<Cplx<T>> {
    let lap = real_laplacian(&u0.values, grid);
    let nx = grid.n_xprime;
    let mut rate = Array2::zeros((2, grid.n_axial));
    for j in 0..grid.n_axial {
        for (side, i) in [(0usize, 0usize), (1, nx - 1)] {
            let v = lap[(i, j)] - background[(i, j)] * u0.values[(i, j)];
            rate[(side, j)] = Cplx::new(T::zero(), v);
        }
    }
    rate
}

/// Second-order Laplacian of a real plane, one-sided stencils at edges.
pub fn real_laplacian<T: Scalar>(plane: &Array2<T>, grid: &SpaceTimeGrid<T>) -> Array2<T> {
    &diff2(plane, Axis(0), grid.h_xprime()) + &diff2(plane, Axis(1), grid.h_axial())
}

/// Time-independent lateral data built from a rate plane.
pub fn constant_lateral_data<T: Scalar>(
    rate: &Array2<Cplx<T>>,
    grid: &SpaceTimeGrid<T>,
) -> LateralData<T> {
    let mut g = Array3::zeros((grid.n_time, 2, grid.n_axial));
    for k in 0..grid.n_time {
        for side in 0..2 {
            for j in 0..grid.n_axial {
                g[(k, side, j)] = rate[(side, j)];
            }
        }
    }
    g
}

/// Interior-point indexing for the five-point scheme: `x'` runs fastest, so
/// the matrix bandwidth equals the interior transverse count.
pub struct InteriorMap {
    pub mi: usize,
    pub mj: usize,
}

impl InteriorMap {
    pub fn new(grid_nx: usize, grid_na: usize) -> Self {
        Self {
            mi: grid_nx - 2,
            mj: grid_na - 2,
        }
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        (i - 1) + (j - 1) * self.mi
    }

    pub fn len(&self) -> usize {
        self.mi * self.mj
    }
}

/// One Crank-Nicolson propagator: owns the factored step matrix.
pub struct SchrodingerStepper<T: Scalar> {
    grid: Arc<SpaceTimeGrid<T>>,
    q: Array2<T>,
    lu: BandedLu<T>,
    map: InteriorMap,
    theta: T,
}

impl<T: Scalar> SchrodingerStepper<T> {
    pub fn new(grid: Arc<SpaceTimeGrid<T>>, q: &Array2<T>) -> Result<Self> {
        if grid.time_axis != TimeAxis::Forward {
            return Err(Error::Solver("stepping needs a forward time axis".into()));
        }
        let map = InteriorMap::new(grid.n_xprime, grid.n_axial);
        let theta = grid.dt() * lit::<T>(0.5);
        let ihx2 = T::one() / (grid.h_xprime() * grid.h_xprime());
        let iha2 = T::one() / (grid.h_axial() * grid.h_axial());
        let two = lit::<T>(2.0);
        let mut m = BandedMatrix::<T>::zeros(map.len(), map.mi);
        for j in 1..=map.mj {
            for i in 1..=map.mi {
                let row = map.idx(i, j);
                let diag_h = two * ihx2 + two * iha2 + q[(i, j)];
                m.set(row, row, Cplx::new(T::one(), theta * diag_h));
                if i > 1 {
                    m.set(row, map.idx(i - 1, j), Cplx::new(T::zero(), -theta * ihx2));
                }
                if i < map.mi {
                    m.set(row, map.idx(i + 1, j), Cplx::new(T::zero(), -theta * ihx2));
                }
                if j > 1 {
                    m.set(row, map.idx(i, j - 1), Cplx::new(T::zero(), -theta * iha2));
                }
                if j < map.mj {
                    m.set(row, map.idx(i, j + 1), Cplx::new(T::zero(), -theta * iha2));
                }
            }
        }
        Ok(Self {
            grid,
            q: q.clone(),
            lu: m.factor()?,
            map,
            theta,
        })
    }

    /// `(H u)` at interior points, with lateral wall values `g` and zero at
    /// the axial caps; `H = -Lap + q`.
    fn apply_h(&self, u: &[Cplx<T>], g_plane: Option<&[Cplx<T>]>, out: &mut [Cplx<T>]) {
        let grid = &self.grid;
        let ihx2 = T::one() / (grid.h_xprime() * grid.h_xprime());
        let iha2 = T::one() / (grid.h_axial() * grid.h_axial());
        let two = lit::<T>(2.0);
        let map = &self.map;
        for j in 1..=map.mj {
            for i in 1..=map.mi {
                let row = map.idx(i, j);
                let mut acc = u[row] * (two * ihx2 + two * iha2 + self.q[(i, j)]);
                let left = if i > 1 {
                    u[map.idx(i - 1, j)]
                } else {
                    g_plane.map_or(Cplx::new(T::zero(), T::zero()), |g| g[j])
                };
                let right = if i < map.mi {
                    u[map.idx(i + 1, j)]
                } else {
                    g_plane.map_or(Cplx::new(T::zero(), T::zero()), |g| g[grid.n_axial + j])
                };
                acc = acc - (left + right) * ihx2;
                if j > 1 {
                    acc = acc - u[map.idx(i, j - 1)] * iha2;
                }
                if j < map.mj {
                    acc = acc - u[map.idx(i, j + 1)] * iha2;
                }
                out[row] = acc;
            }
        }
    }

    pub fn map(&self) -> &InteriorMap {
        &self.map
    }

    pub fn theta(&self) -> T {
        self.theta
    }

    /// Solves `A x = rhs` in place with the cached factorization.
    pub fn solve_step_matrix(&self, rhs: &mut [Cplx<T>]) {
        self.lu.solve(rhs);
    }

    /// `B u = u - i theta H u` with homogeneous wall data.
    pub fn apply_b_homogeneous(&self, u: &[Cplx<T>]) -> Vec<Cplx<T>> {
        let n = self.map.len();
        let mut hu = vec![Cplx::new(T::zero(), T::zero()); n];
        self.apply_h(u, None, &mut hu);
        let minus_i_theta = Cplx::new(T::zero(), -self.theta);
        (0..n).map(|r| u[r] + hu[r] * minus_i_theta).collect()
    }

    /// Advances one step given wall data at both time levels. The `g`
    /// planes are flattened `(side, x_n)` rows: `g[j]` for the low wall,
    /// `g[n_axial + j]` for the high wall.
    pub fn step(&self, u: &mut Vec<Cplx<T>>, g_now: &[Cplx<T>], g_next: &[Cplx<T>]) {
        let n = self.map.len();
        let mut hu = vec![Cplx::new(T::zero(), T::zero()); n];
        self.apply_h(u, Some(g_now), &mut hu);
        let minus_i_theta = Cplx::new(T::zero(), -self.theta);
        let mut rhs: Vec<Cplx<T>> = (0..n).map(|r| u[r] + hu[r] * minus_i_theta).collect();
        // Wall couplings of the implicit side move to the right-hand side.
        let grid = &self.grid;
        let ihx2 = T::one() / (grid.h_xprime() * grid.h_xprime());
        let i_theta = Cplx::new(T::zero(), self.theta);
        let map = &self.map;
        for j in 1..=map.mj {
            rhs[map.idx(1, j)] += g_next[j] * i_theta * ihx2;
            rhs[map.idx(map.mi, j)] += g_next[grid.n_axial + j] * i_theta * ihx2;
        }
        self.lu.solve(&mut rhs);
        *u = rhs;
    }
}

fn flatten_wall_plane<T: Scalar>(g: &LateralData<T>, k: usize, na: usize) -> Vec<Cplx<T>> {
    let mut plane = vec![Cplx::new(T::zero(), T::zero()); 2 * na];
    for j in 0..na {
        plane[j] = g[(k, 0, j)];
        plane[na + j] = g[(k, 1, j)];
    }
    plane
}

/// Solves the initial boundary value problem with complex initial plane
/// `u0` (full grid shape) and lateral Dirichlet data `g`.
pub fn solve_with_initial_plane<T: Scalar>(
    q: &Potential<T>,
    u0: &Array2<Cplx<T>>,
    g: &LateralData<T>,
    grid: &Arc<SpaceTimeGrid<T>>,
) -> Result<ComplexField<T>> {
    let (nx, na, nt) = (grid.n_xprime, grid.n_axial, grid.n_time);
    if u0.dim() != (nx, na) {
        return Err(Error::Solver("initial plane shape mismatch".into()));
    }
    if g.dim() != (nt, 2, na) {
        return Err(Error::Solver("lateral data shape mismatch".into()));
    }
    // Compatibility of the data corner: g(0, wall) must match u0 there.
    let scale = u0
        .iter()
        .map(|z| z.norm())
        .fold(T::zero(), T::max)
        .max(g.iter().map(|z| z.norm()).fold(T::zero(), T::max))
        .max(T::one());
    for j in 0..na {
        for (side, i) in [(0usize, 0usize), (1, nx - 1)] {
            if (g[(0, side, j)] - u0[(i, j)]).norm() > lit::<T>(1e-8) * scale {
                return Err(Error::Solver(
                    "boundary data incompatible with the initial state at t = 0".into(),
                ));
            }
        }
    }
    let stepper = SchrodingerStepper::new(grid.clone(), &q.values)?;
    let map = InteriorMap::new(nx, na);
    let mut u: Vec<Cplx<T>> = (1..=map.mj)
        .flat_map(|j| (1..=map.mi).map(move |i| (i, j)))
        .map(|(i, j)| u0[(i, j)])
        .collect();
    let mut out = Array3::<Cplx<T>>::zeros((nt, nx, na));
    let write_slice = |out: &mut Array3<Cplx<T>>, k: usize, u: &[Cplx<T>], g: &LateralData<T>| {
        for j in 0..na {
            out[(k, 0, j)] = g[(k, 0, j)];
            out[(k, nx - 1, j)] = g[(k, 1, j)];
        }
        for i in 1..nx - 1 {
            out[(k, i, 0)] = Cplx::new(T::zero(), T::zero());
            out[(k, i, na - 1)] = Cplx::new(T::zero(), T::zero());
        }
        for j in 1..na - 1 {
            for i in 1..nx - 1 {
                out[(k, i, j)] = u[map.idx(i, j)];
            }
        }
    };
    write_slice(&mut out, 0, &u, g);
    for k in 0..nt - 1 {
        let g_now = flatten_wall_plane(g, k, na);
        let g_next = flatten_wall_plane(g, k + 1, na);
        stepper.step(&mut u, &g_now, &g_next);
        write_slice(&mut out, k + 1, &u, g);
    }
    ComplexField::new(grid.clone(), Region::Volume, out)
}

/// Solves the original system for a real initial state.
pub fn solve_schrodinger<T: Scalar>(
    q: &Potential<T>,
    u0: &InitialState<T>,
    g: &LateralData<T>,
    grid: &Arc<SpaceTimeGrid<T>>,
) -> Result<ComplexField<T>> {
    let plane = u0.values.mapv(|v| Cplx::new(v, T::zero()));
    solve_with_initial_plane(q, &plane, g, grid)
}

/// Solves the time-differentiated system: initial plane `i (Lap - q) u0`,
/// wall data `i (Lap - p) u0` (time independent).
pub fn solve_derivative<T: Scalar>(
    q: &Potential<T>,
    u0: &InitialState<T>,
    grid: &Arc<SpaceTimeGrid<T>>,
) -> Result<ComplexField<T>> {
    let lap = real_laplacian(&u0.values, grid);
    let mut plane = Array2::<Cplx<T>>::zeros(u0.values.dim());
    for i in 0..grid.n_xprime {
        for j in 0..grid.n_axial {
            plane[(i, j)] = Cplx::new(
                T::zero(),
                lap[(i, j)] - q.values[(i, j)] * u0.values[(i, j)],
            );
        }
    }
    let rate = boundary_rate(u0, &q.background, grid);
    let g = constant_lateral_data(&rate, grid);
    solve_with_initial_plane(q, &plane, &g, grid)
}

/// `-i d_t f - Lap f + q f` by second-order differences (PDE residual).
pub fn apply_schrodinger_operator<T: Scalar>(
    f: &ComplexField<T>,
    q: Option<&Array2<T>>,
) -> Result<ComplexField<T>> {
    if f.region() != Region::Volume {
        return Err(Error::Region("operator acts on volume fields".into()));
    }
    let grid = f.grid().clone();
    let v = f.values();
    let minus_i = Cplx::new(T::zero(), -T::one());
    let dt = diff1(v, Axis(0), grid.dt());
    let lap = &diff2(v, Axis(1), grid.h_xprime()) + &diff2(v, Axis(2), grid.h_axial());
    let mut out = Array3::zeros(v.raw_dim());
    for k in 0..grid.n_time {
        for i in 0..grid.n_xprime {
            for j in 0..grid.n_axial {
                let mut acc = dt[(k, i, j)] * minus_i - lap[(k, i, j)];
                if let Some(q) = q {
                    acc = acc + v[(k, i, j)] * q[(i, j)];
                }
                out[(k, i, j)] = acc;
            }
        }
    }
    ComplexField::new(grid, Region::Volume, out)
}

/// Weighted spatial L2 norm of one time slice.
pub fn slice_l2_norm<T: Scalar>(f: &ComplexField<T>, k: usize) -> T {
    let grid = f.grid();
    let v = f.values();
    let mut acc = T::zero();
    for i in 0..grid.n_xprime {
        for j in 0..grid.n_axial {
            acc += grid.xprime_weight(i) * grid.axial_weight(j) * v[(k, i, j)].norm_sqr();
        }
    }
    acc.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{make_grid, GridConfig};
    use std::f64::consts::PI;

    fn forward_grid(nx: usize, na: usize, nt: usize) -> Arc<SpaceTimeGrid<f64>> {
        Arc::new(
            make_grid(&GridConfig {
                omega: (0.0, 1.0),
                axial_halfwidth: 4.0,
                time_halfwidth: 1.0,
                support_halfwidth: 1.5,
                n_xprime: nx,
                n_axial: na,
                n_time: nt,
                time_axis: TimeAxis::Forward,
            })
            .unwrap(),
        )
    }

    fn zero_potential(grid: &SpaceTimeGrid<f64>) -> Potential<f64> {
        let z = Array2::zeros((grid.n_xprime, grid.n_axial));
        Potential::new(z.clone(), z, 1.0, 1.5, grid).unwrap()
    }

    fn eigenmode(grid: &SpaceTimeGrid<f64>, m: usize) -> (Array2<Cplx<f64>>, f64) {
        let x = grid.axial_halfwidth;
        let kappa = m as f64 * PI / (2.0 * x);
        let mu = PI * PI + kappa * kappa;
        let mut plane = Array2::zeros((grid.n_xprime, grid.n_axial));
        for i in 0..grid.n_xprime {
            for j in 0..grid.n_axial {
                plane[(i, j)] = Cplx::new(
                    (PI * grid.xprime(i)).sin() * (kappa * (grid.axial(j) + x)).sin(),
                    0.0,
                );
            }
        }
        (plane, mu)
    }

    fn eigenmode_error(nx: usize, na: usize, nt: usize) -> f64 {
        let grid = forward_grid(nx, na, nt);
        let q = zero_potential(&grid);
        let (plane, mu) = eigenmode(&grid, 2);
        let g = Array3::zeros((grid.n_time, 2, grid.n_axial));
        let u = solve_with_initial_plane(&q, &plane, &g, &grid).unwrap();
        let mut worst = 0.0f64;
        let k = grid.n_time - 1;
        let t = grid.time(k);
        let phase = Cplx::new(0.0, -mu * t).exp();
        for i in 0..grid.n_xprime {
            for j in 0..grid.n_axial {
                let want = plane[(i, j)] * phase;
                worst = worst.max((u.values()[(k, i, j)] - want).norm());
            }
        }
        worst
    }

    #[test]
    fn eigenfunction_evolution_converges_second_order() {
        let e1 = eigenmode_error(9, 17, 33);
        let e2 = eigenmode_error(17, 33, 65);
        let e3 = eigenmode_error(33, 65, 129);
        let p1 = (e1 / e2).log2();
        let p2 = (e2 / e3).log2();
        assert!(
            (1.7..2.4).contains(&p1) && (1.7..2.4).contains(&p2),
            "orders {p1} {p2} (errors {e1} {e2} {e3})"
        );
    }

    #[test]
    fn homogeneous_run_conserves_norm() {
        let grid = forward_grid(17, 33, 33);
        let q = zero_potential(&grid);
        let (plane, _) = eigenmode(&grid, 3);
        let g = Array3::zeros((grid.n_time, 2, grid.n_axial));
        let u = solve_with_initial_plane(&q, &plane, &g, &grid).unwrap();
        let n0 = slice_l2_norm(&u, 0);
        for k in 1..grid.n_time {
            let nk = slice_l2_norm(&u, k);
            assert!((nk - n0).abs() / n0 < 1e-10, "k={k}: {nk} vs {n0}");
        }
    }

    #[test]
    fn incompatible_corner_rejected() {
        let grid = forward_grid(9, 17, 9);
        let q = zero_potential(&grid);
        let plane = Array2::from_elem((grid.n_xprime, grid.n_axial), Cplx::new(1.0, 0.0));
        let g = Array3::zeros((grid.n_time, 2, grid.n_axial));
        assert!(solve_with_initial_plane(&q, &plane, &g, &grid).is_err());
    }

    #[test]
    fn identical_potentials_identical_solutions() {
        let grid = forward_grid(9, 17, 9);
        let q = zero_potential(&grid);
        let (plane, _) = eigenmode(&grid, 1);
        let g = Array3::zeros((grid.n_time, 2, grid.n_axial));
        let u1 = solve_with_initial_plane(&q, &plane, &g, &grid).unwrap();
        let u2 = solve_with_initial_plane(&q, &plane, &g, &grid).unwrap();
        assert_eq!(u1.values(), u2.values());
    }
}

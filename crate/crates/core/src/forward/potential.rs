//! Admissible potentials and initial states.

use ndarray::{Array2, Axis};

use crate::error::{Error, Result};
use crate::fd::{diff1, diff2};
use crate::scalar::{lit, Scalar};
use crate::domain::SpaceTimeGrid;

/// Real spatial potential with admissibility metadata: bounded discrete
/// `W^{2,inf}` surrogate, agreement with the background on the lateral
/// walls, and a compact-support radius for pair differences.
#[derive(Debug, Clone)]
pub struct Potential<T> {
    pub values: Array2<T>,
    pub background: Array2<T>,
    pub bound_m: T,
    pub support_halfwidth: T,
}

/// `max(sup |q|, sup |dq|, sup |d2q|)` over both axes by finite differences.
pub fn w2inf_surrogate<T: Scalar>(values: &Array2<T>, grid: &SpaceTimeGrid<T>) -> T {
    let hx = grid.h_xprime();
    let ha = grid.h_axial();
    let sup = |a: &Array2<T>| a.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    let mut out = sup(values);
    out = out.max(sup(&diff1(values, Axis(0), hx)));
    out = out.max(sup(&diff1(values, Axis(1), ha)));
    out = out.max(sup(&diff2(values, Axis(0), hx)));
    out = out.max(sup(&diff2(values, Axis(1), ha)));
    out
}

impl<T: Scalar> Potential<T> {
    pub fn new(
        values: Array2<T>,
        background: Array2<T>,
        bound_m: T,
        support_halfwidth: T,
        grid: &SpaceTimeGrid<T>,
    ) -> Result<Self> {
        let p = Self {
            values,
            background,
            bound_m,
            support_halfwidth,
        };
        p.check_admissible(grid)?;
        Ok(p)
    }

    pub fn check_admissible(&self, grid: &SpaceTimeGrid<T>) -> Result<()> {
        let (nx, na) = self.values.dim();
        if (nx, na) != (grid.n_xprime, grid.n_axial)
            || self.background.dim() != (nx, na)
        {
            return Err(Error::Admissibility("potential shape mismatch".into()));
        }
        let norm = w2inf_surrogate(&self.values, grid);
        if norm > self.bound_m * (T::one() + lit::<T>(1e-12)) {
            return Err(Error::Admissibility(format!(
                "W^{{2,inf}} surrogate {} exceeds bound {}",
                norm.to_f64().unwrap_or(f64::NAN),
                self.bound_m.to_f64().unwrap_or(f64::NAN)
            )));
        }
        let scale = self
            .values
            .iter()
            .fold(T::one(), |m, v| m.max(v.abs()));
        for j in 0..na {
            for i in [0usize, nx - 1] {
                if (self.values[(i, j)] - self.background[(i, j)]).abs()
                    > lit::<T>(1e-12) * scale
                {
                    return Err(Error::Admissibility(
                        "potential differs from background on the lateral walls".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Checks that two potentials form an admissible pair: shared data and
    /// a difference supported in `|x_n| < ell`.
    pub fn check_pair(&self, other: &Self, grid: &SpaceTimeGrid<T>) -> Result<()> {
        self.check_admissible(grid)?;
        other.check_admissible(grid)?;
        if self.support_halfwidth != other.support_halfwidth {
            return Err(Error::Admissibility("pair support radii differ".into()));
        }
        let scale = self
            .values
            .iter()
            .chain(other.values.iter())
            .fold(T::one(), |m, v| m.max(v.abs()));
        for j in 0..grid.n_axial {
            if grid.axial(j).abs() >= self.support_halfwidth {
                for i in 0..grid.n_xprime {
                    if (self.values[(i, j)] - other.values[(i, j)]).abs()
                        > lit::<T>(1e-12) * scale
                    {
                        return Err(Error::Admissibility(
                            "pair difference leaks outside the compact support".into(),
                        ));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Real initial state, bounded below on the core region.
#[derive(Debug, Clone)]
pub struct InitialState<T> {
    pub values: Array2<T>,
    pub alpha: T,
    pub ell: T,
}

impl<T: Scalar> InitialState<T> {
    pub fn new(values: Array2<T>, alpha: T, ell: T, grid: &SpaceTimeGrid<T>) -> Result<Self> {
        if alpha <= T::zero() {
            return Err(Error::Admissibility("alpha must be positive".into()));
        }
        let state = Self { values, alpha, ell };
        state.check(grid)?;
        Ok(state)
    }

    pub fn check(&self, grid: &SpaceTimeGrid<T>) -> Result<()> {
        let (nx, na) = self.values.dim();
        if (nx, na) != (grid.n_xprime, grid.n_axial) {
            return Err(Error::Admissibility("initial state shape mismatch".into()));
        }
        let tol = lit::<T>(1e-12);
        for j in 0..na {
            let xn = grid.axial(j);
            for i in 0..nx {
                if xn.abs() < self.ell && self.values[(i, j)] < self.alpha - tol {
                    return Err(Error::Admissibility(
                        "initial state falls below alpha on the core region".into(),
                    ));
                }
            }
        }
        let max = self.values.iter().fold(T::zero(), |m, v| m.max(v.abs()));
        for i in 0..nx {
            for j in [0usize, na - 1] {
                if self.values[(i, j)].abs() > lit::<T>(1e-9) * max.max(T::one()) {
                    return Err(Error::Admissibility(
                        "initial state does not vanish at the axial truncation".into(),
                    ));
                }
            }
        }
        if !self.h4_surrogate(grid).is_finite() {
            return Err(Error::Admissibility("H^4 surrogate not finite".into()));
        }
        Ok(())
    }

    /// Discrete `H^4`-type surrogate: L2 norms of pure derivatives up to
    /// fourth order (finiteness check, not a sharp norm).
    pub fn h4_surrogate(&self, grid: &SpaceTimeGrid<T>) -> T {
        let hx = grid.h_xprime();
        let ha = grid.h_axial();
        let sq = |a: &Array2<T>| -> T {
            let mut acc = T::zero();
            for i in 0..a.dim().0 {
                for j in 0..a.dim().1 {
                    let w = grid.xprime_weight(i) * grid.axial_weight(j);
                    acc += w * a[(i, j)] * a[(i, j)];
                }
            }
            acc
        };
        let dx2 = diff2(&self.values, Axis(0), hx);
        let da2 = diff2(&self.values, Axis(1), ha);
        let mut acc = sq(&self.values);
        acc += sq(&diff1(&self.values, Axis(0), hx));
        acc += sq(&diff1(&self.values, Axis(1), ha));
        acc += sq(&dx2);
        acc += sq(&da2);
        acc += sq(&diff2(&dx2, Axis(0), hx));
        acc += sq(&diff2(&da2, Axis(1), ha));
        acc.sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{make_grid, GridConfig, TimeAxis};

    fn grid() -> SpaceTimeGrid<f64> {
        make_grid(&GridConfig {
            omega: (0.0, 1.0),
            axial_halfwidth: 4.0,
            time_halfwidth: 1.0,
            support_halfwidth: 1.5,
            n_xprime: 17,
            n_axial: 33,
            n_time: 9,
            time_axis: TimeAxis::Forward,
        })
        .unwrap()
    }

    fn bump(x: f64, half: f64) -> f64 {
        if x.abs() >= half {
            0.0
        } else {
            let u = x / half;
            (1.0 - u * u).powi(3)
        }
    }

    #[test]
    fn admissible_potential_accepted() {
        let g = grid();
        let mut q = Array2::zeros((g.n_xprime, g.n_axial));
        for i in 0..g.n_xprime {
            for j in 0..g.n_axial {
                let xp = g.xprime(i);
                let s = (std::f64::consts::PI * xp).sin().powi(3);
                q[(i, j)] = 0.3 * s * bump(g.axial(j), 1.2);
            }
        }
        let p = Array2::zeros((g.n_xprime, g.n_axial));
        assert!(Potential::new(q, p, 50.0, 1.5, &g).is_ok());
    }

    #[test]
    fn wall_disagreement_rejected() {
        let g = grid();
        let q = Array2::from_elem((g.n_xprime, g.n_axial), 1.0);
        let p = Array2::zeros((g.n_xprime, g.n_axial));
        assert!(Potential::new(q, p, 50.0, 1.5, &g).is_err());
    }

    #[test]
    fn bound_violation_rejected() {
        let g = grid();
        let mut q = Array2::zeros((g.n_xprime, g.n_axial));
        for i in 1..g.n_xprime - 1 {
            for j in 0..g.n_axial {
                q[(i, j)] = 100.0 * (std::f64::consts::PI * g.xprime(i)).sin();
            }
        }
        let p = Array2::zeros((g.n_xprime, g.n_axial));
        assert!(Potential::new(q, p, 1.0, 1.5, &g).is_err());
    }

    #[test]
    fn initial_state_positivity_enforced() {
        let g = grid();
        let mut u0 = Array2::zeros((g.n_xprime, g.n_axial));
        for i in 0..g.n_xprime {
            for j in 0..g.n_axial {
                u0[(i, j)] = 1.0 * bump(g.axial(j), 2.0);
            }
        }
        // Plateau does not reach alpha over the whole core region.
        assert!(InitialState::new(u0.clone(), 1.0, 1.5, &g).is_err());
        for i in 0..g.n_xprime {
            for j in 0..g.n_axial {
                u0[(i, j)] = 2.0 * bump(g.axial(j), 3.5);
            }
        }
        assert!(InitialState::new(u0, 1.0, 0.75, &g).is_ok());
    }
}

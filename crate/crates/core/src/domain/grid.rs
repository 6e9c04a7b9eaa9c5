//! Uniform tensor grid on the truncated waveguide.
//!
//! The domain is the box `omega x (-X, X)` with `omega` a bounded interval,
//! crossed with either the forward time span `(0, T)` or the symmetric span
//! `(-T, T)`. Symmetric-time grids use staggered (cell-midpoint) nodes so
//! that the singular instants `t = -T` and `t = T` never carry a node.

use crate::error::{Error, Result};
use crate::scalar::{lit, Scalar};

/// Which time span the grid covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimeAxis {
    /// Regular nodes `t_k = k T/(n-1)` on `[0, T]`.
    Forward,
    /// Staggered nodes `t_k = -T + (k + 1/2) * 2T/n` on `(-T, T)`.
    Symmetric,
}

/// Parameters for [`make_grid`].
#[derive(Debug, Clone)]
pub struct GridConfig<T> {
    pub omega: (T, T),
    pub axial_halfwidth: T,
    pub time_halfwidth: T,
    /// Largest compact-support parameter any experiment will use on this
    /// grid; the axial truncation must lie strictly outside it.
    pub support_halfwidth: T,
    pub n_xprime: usize,
    pub n_axial: usize,
    pub n_time: usize,
    pub time_axis: TimeAxis,
}

/// Uniform space-time grid with trapezoidal quadrature weights attached.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTimeGrid<T> {
    pub omega: (T, T),
    pub axial_halfwidth: T,
    pub time_halfwidth: T,
    pub support_halfwidth: T,
    pub n_xprime: usize,
    pub n_axial: usize,
    pub n_time: usize,
    pub time_axis: TimeAxis,
    h_xprime: T,
    h_axial: T,
    dt: T,
    wt: Vec<T>,
    wx: Vec<T>,
    wa: Vec<T>,
}

/// Builds a grid, validating extents and the truncation margin.
pub fn make_grid<T: Scalar>(config: &GridConfig<T>) -> Result<SpaceTimeGrid<T>> {
    let (a, b) = config.omega;
    if b <= a {
        return Err(Error::Grid("cross-section interval is empty".into()));
    }
    if config.axial_halfwidth <= T::zero() || config.time_halfwidth <= T::zero() {
        return Err(Error::Grid("non-positive domain extent".into()));
    }
    if config.n_xprime < 3 || config.n_axial < 3 || config.n_time < 3 {
        return Err(Error::Grid("all node counts must be at least 3".into()));
    }
    if config.axial_halfwidth <= config.support_halfwidth {
        return Err(Error::Grid(
            "axial truncation inside compact support".into(),
        ));
    }
    let h_xprime = (b - a) / lit::<T>((config.n_xprime - 1) as f64);
    let h_axial = lit::<T>(2.0) * config.axial_halfwidth / lit::<T>((config.n_axial - 1) as f64);
    let half = lit::<T>(0.5);
    let (dt, wt) = match config.time_axis {
        TimeAxis::Forward => {
            let dt = config.time_halfwidth / lit::<T>((config.n_time - 1) as f64);
            (dt, trapezoid_weights(config.n_time, dt))
        }
        TimeAxis::Symmetric => {
            // Midpoint rule: every staggered node owns one full cell.
            let dt = lit::<T>(2.0) * config.time_halfwidth / lit::<T>(config.n_time as f64);
            (dt, vec![dt; config.n_time])
        }
    };
    let _ = half;
    Ok(SpaceTimeGrid {
        omega: config.omega,
        axial_halfwidth: config.axial_halfwidth,
        time_halfwidth: config.time_halfwidth,
        support_halfwidth: config.support_halfwidth,
        n_xprime: config.n_xprime,
        n_axial: config.n_axial,
        n_time: config.n_time,
        time_axis: config.time_axis,
        h_xprime,
        h_axial,
        dt,
        wt,
        wx: trapezoid_weights(config.n_xprime, h_xprime),
        wa: trapezoid_weights(config.n_axial, h_axial),
    })
}

fn trapezoid_weights<T: Scalar>(n: usize, h: T) -> Vec<T> {
    let mut w = vec![h; n];
    w[0] = h * lit::<T>(0.5);
    w[n - 1] = h * lit::<T>(0.5);
    w
}

impl<T: Scalar> SpaceTimeGrid<T> {
    pub fn h_xprime(&self) -> T {
        self.h_xprime
    }

    pub fn h_axial(&self) -> T {
        self.h_axial
    }

    pub fn dt(&self) -> T {
        self.dt
    }

    /// Cross-section node `x'_i`.
    pub fn xprime(&self, i: usize) -> T {
        self.omega.0 + lit::<T>(i as f64) * self.h_xprime
    }

    /// Axial node `x_{n,j}` in `[-X, X]`.
    pub fn axial(&self, j: usize) -> T {
        -self.axial_halfwidth + lit::<T>(j as f64) * self.h_axial
    }

    /// Time node `t_k`.
    pub fn time(&self, k: usize) -> T {
        match self.time_axis {
            TimeAxis::Forward => lit::<T>(k as f64) * self.dt,
            TimeAxis::Symmetric => {
                -self.time_halfwidth + (lit::<T>(k as f64) + lit::<T>(0.5)) * self.dt
            }
        }
    }

    pub fn time_weight(&self, k: usize) -> T {
        self.wt[k]
    }

    pub fn xprime_weight(&self, i: usize) -> T {
        self.wx[i]
    }

    pub fn axial_weight(&self, j: usize) -> T {
        self.wa[j]
    }

    /// Index of the time node closest to `t = 0`.
    pub fn time_index_nearest_zero(&self) -> usize {
        let mut best = 0;
        let mut dist = self.time(0).abs();
        for k in 1..self.n_time {
            let d = self.time(k).abs();
            if d < dist {
                dist = d;
                best = k;
            }
        }
        best
    }

    /// Grid with every axis refined once (spacings halved), same extents.
    pub fn refined(&self) -> Result<SpaceTimeGrid<T>> {
        make_grid(&GridConfig {
            omega: self.omega,
            axial_halfwidth: self.axial_halfwidth,
            time_halfwidth: self.time_halfwidth,
            support_halfwidth: self.support_halfwidth,
            n_xprime: 2 * self.n_xprime - 1,
            n_axial: 2 * self.n_axial - 1,
            n_time: match self.time_axis {
                TimeAxis::Forward => 2 * self.n_time - 1,
                TimeAxis::Symmetric => 2 * self.n_time,
            },
            time_axis: self.time_axis,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn default_config() -> GridConfig<f64> {
        GridConfig {
            omega: (0.0, 1.0),
            axial_halfwidth: 4.0,
            time_halfwidth: 1.0,
            support_halfwidth: 1.5,
            n_xprime: 33,
            n_axial: 129,
            n_time: 65,
            time_axis: TimeAxis::Symmetric,
        }
    }

    #[test]
    fn spacings_match_counts() {
        let g = make_grid(&default_config()).unwrap();
        assert_eq!(g.h_xprime(), 1.0 / 32.0);
        assert_eq!(g.h_axial(), 8.0 / 128.0);
    }

    #[test]
    fn truncation_inside_support_rejected() {
        let mut cfg = default_config();
        cfg.axial_halfwidth = 2.0;
        cfg.support_halfwidth = 3.0;
        let err = make_grid(&cfg).unwrap_err();
        assert!(err.to_string().contains("compact support"));
    }

    #[test]
    fn small_counts_rejected() {
        let mut cfg = default_config();
        cfg.n_xprime = 2;
        assert!(make_grid(&cfg).is_err());
    }

    #[test]
    fn staggered_nodes_avoid_endpoints() {
        let g = make_grid(&default_config()).unwrap();
        for k in 0..g.n_time {
            let t = g.time(k);
            assert!((t - (-1.0 + (k as f64 + 0.5) * 2.0 / 65.0)).abs() < 1e-14);
            assert!(t.abs() < 1.0);
        }
    }

    #[test]
    fn forward_axis_covers_zero_to_t() {
        let mut cfg = default_config();
        cfg.time_axis = TimeAxis::Forward;
        let g = make_grid(&cfg).unwrap();
        assert_eq!(g.time(0), 0.0);
        assert!((g.time(g.n_time - 1) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn quadrature_weights_sum_to_measures() {
        let g = make_grid(&default_config()).unwrap();
        let st: f64 = (0..g.n_time).map(|k| g.time_weight(k)).sum();
        let sx: f64 = (0..g.n_xprime).map(|i| g.xprime_weight(i)).sum();
        let sa: f64 = (0..g.n_axial).map(|j| g.axial_weight(j)).sum();
        assert!((st - 2.0).abs() < 1e-14);
        assert!((sx - 1.0).abs() < 1e-14);
        assert!((sa - 8.0).abs() < 1e-14);
    }
}

//! Complex scalar samples on a grid region.

use std::sync::Arc;

use ndarray::Array3;

use crate::error::{Error, Result};
use crate::scalar::{Cplx, Scalar};

use super::grid::SpaceTimeGrid;

/// Which part of the space-time box a field's samples live on.
///
/// Shapes by region: `Volume` is `(n_time, n_xprime, n_axial)`, `Lateral`
/// is `(n_time, 2, n_axial)` with the middle index picking the side of
/// `d(omega)`, `AxialEnds` is `(n_time, n_xprime, 2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    Volume,
    Lateral,
    AxialEnds,
}

/// Complex field on one region of a space-time grid.
#[derive(Debug, Clone)]
pub struct ComplexField<T> {
    grid: Arc<SpaceTimeGrid<T>>,
    region: Region,
    values: Array3<Cplx<T>>,
}

impl<T: Scalar> ComplexField<T> {
    pub fn new(
        grid: Arc<SpaceTimeGrid<T>>,
        region: Region,
        values: Array3<Cplx<T>>,
    ) -> Result<Self> {
        let expect = Self::shape_for(&grid, region);
        if values.dim() != expect {
            return Err(Error::Region(format!(
                "value shape {:?} does not match region shape {:?}",
                values.dim(),
                expect
            )));
        }
        if values.iter().any(|z| z.re.is_nan() || z.im.is_nan()) {
            return Err(Error::Region("field contains NaN".into()));
        }
        Ok(Self {
            grid,
            region,
            values,
        })
    }

    pub fn zeros(grid: Arc<SpaceTimeGrid<T>>, region: Region) -> Self {
        let shape = Self::shape_for(&grid, region);
        Self {
            grid,
            region,
            values: Array3::zeros(shape),
        }
    }

    /// Samples `f(t, x', x_n)` on the volume region.
    pub fn from_fn(
        grid: Arc<SpaceTimeGrid<T>>,
        mut f: impl FnMut(T, T, T) -> Cplx<T>,
    ) -> Self {
        let shape = Self::shape_for(&grid, Region::Volume);
        let mut values = Array3::zeros(shape);
        for k in 0..grid.n_time {
            let t = grid.time(k);
            for i in 0..grid.n_xprime {
                let xp = grid.xprime(i);
                for j in 0..grid.n_axial {
                    values[(k, i, j)] = f(t, xp, grid.axial(j));
                }
            }
        }
        Self {
            grid,
            region: Region::Volume,
            values,
        }
    }

    fn shape_for(grid: &SpaceTimeGrid<T>, region: Region) -> (usize, usize, usize) {
        match region {
            Region::Volume => (grid.n_time, grid.n_xprime, grid.n_axial),
            Region::Lateral => (grid.n_time, 2, grid.n_axial),
            Region::AxialEnds => (grid.n_time, grid.n_xprime, 2),
        }
    }

    pub fn grid(&self) -> &Arc<SpaceTimeGrid<T>> {
        &self.grid
    }

    pub fn region(&self) -> Region {
        self.region
    }

    pub fn values(&self) -> &Array3<Cplx<T>> {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut Array3<Cplx<T>> {
        &mut self.values
    }

    pub fn into_values(self) -> Array3<Cplx<T>> {
        self.values
    }

    pub fn max_abs(&self) -> T {
        self.values
            .iter()
            .map(|z| z.norm_sqr())
            .fold(T::zero(), T::max)
            .sqrt()
    }

    /// Pointwise linear combination `self + c * other` on matching regions.
    pub fn axpy(&self, c: Cplx<T>, other: &Self) -> Result<Self> {
        if self.region != other.region || self.values.dim() != other.values.dim() {
            return Err(Error::Region("field shapes differ".into()));
        }
        let values = &self.values + &other.values.mapv(|z| z * c);
        Ok(Self {
            grid: self.grid.clone(),
            region: self.region,
            values,
        })
    }
}

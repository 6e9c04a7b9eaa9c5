//! Discrete geometry of the truncated waveguide: grids, fields, quadrature,
//! subboundaries and trace extraction.

pub mod boundary;
pub mod field;
pub mod grid;
pub mod io;
pub mod norms;

pub use boundary::{neumann_trace, AxialExtent, Side, Subboundary};
pub use field::{ComplexField, Region};
pub use grid::{make_grid, GridConfig, SpaceTimeGrid, TimeAxis};
pub use norms::{l2_norm, RegionSel};

//! Desk-scale numerical laboratory for weighted-observability estimates of
//! the time-dependent Schrodinger equation on a cylindrical waveguide, and
//! for recovering a compactly supported scalar potential from one Neumann
//! boundary measurement.
//!
//! The crate is organized around the objects the estimates are made of:
//!
//! * [`domain`] — grids, complex fields, quadrature, subboundaries, traces;
//! * [`weights`] — the exponential weight family and the conjugated
//!   operators `M1`, `M2`;
//! * [`forward`] — Crank-Nicolson solvers for the initial boundary value
//!   problem, its time derivative, difference systems, time symmetrization;
//! * [`axialfourier`] — the axial Fourier transform, the unitary group
//!   `U_t`, and the commutation/isometry identities behind the dimension
//!   reduction;
//! * [`carleman`] — both sides of the weighted estimates, the axial cutoff,
//!   and the two auxiliary integral identities;
//! * [`stability`] — end-to-end two-potential experiments and regularized
//!   reconstruction from Neumann data;
//! * [`cli`] — batch front end (configuration, orchestration, reports).
//!
//! All numerics are generic over the scalar type ([`Scalar`]); `f64` aliases
//! are exported at the crate root.

pub mod axialfourier;
pub mod carleman;
// pub mod cli;
pub mod domain;
pub mod error;
pub mod fd;
pub mod forward;
pub mod linalg;
pub mod scalar;
// pub mod stability;
pub mod weights;

pub use error::{Error, Result};
pub use scalar::{Cplx, Scalar};

/// f64 instantiations used by the CLI and most tests.
pub type Grid64 = domain::SpaceTimeGrid<f64>;
pub type Field64 = domain::ComplexField<f64>;
pub type Weights64 = weights::CarlemanWeights<f64>;
pub type Potential64 = forward::Potential<f64>;
pub type C64 = num_complex::Complex<f64>;

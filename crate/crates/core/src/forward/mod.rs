//! Forward and linearized initial-boundary value problems: Crank-Nicolson
//! solves of the potential Schrodinger equation, the time-differentiated
//! system, pair difference systems, and the time symmetrization.

pub mod linearized;
pub mod potential;
pub mod solver;

pub use linearized::{difference_system, interp_time_slice, symmetrize_time, DifferenceSystem};
pub use potential::{w2inf_surrogate, InitialState, Potential};
pub use solver::{
    apply_schrodinger_operator, boundary_data_g, boundary_rate, constant_lateral_data,
    real_laplacian, slice_l2_norm, solve_derivative, solve_schrodinger,
    solve_with_initial_plane, LateralData, SchrodingerStepper,
};

//! Nonlinear residual of the traveling system, forcing constructors, linearizations and the 1D reduction.

pub mod forcing;
pub mod linearized;
pub mod reduced;
pub mod residual;

pub use forcing::{forcing_from_stress, forcing_poly, forcing_poly_derivative, ForcingData, StressForcingInput};
pub use linearized::{apply_linearized, apply_principal, apply_q, apply_q_s_split, apply_remainder, apply_s};
pub use reduced::{residual_1d, residual_1d_flux, residual_1d_flux_derivative, v_from_eta, v_from_eta_flux};
pub use residual::{apply_trivial_linearization, residual, Residual};

//! Periodic grids, unitary transforms, Fourier multipliers and norms.

pub mod field;
pub mod grid;
pub mod norms;
pub mod ops;
pub mod random;

pub use field::{SpectralField, State};
pub use grid::Grid;
pub use norms::{aniso_norm, param_norms, sobolev_norm, x0_norm, y0_norm, ParamNorms};
pub use ops::{
    apply_matrix_multiplier, apply_multiplier, dealias, divergence, dyadic_smoother, freq_split, gradient,
    laplacian, leray_project, riesz, stress_d0, stress_s,
};

//! Exact trivial inverse, preconditioned Krylov solves and damped Newton iterations.

pub mod config;
pub mod krylov;
pub mod newton;
pub mod one_d;
pub mod trivial;

pub use config::NewtonConfig;
pub use krylov::{gmres, KrylovOutcome};
pub use newton::{
    dissipation_integral, dissipation_residual, newton_solve, newton_solve_detailed, solve_linearized,
    solve_linearized_with_info, SolveReport,
};
pub use one_d::{solve_1d, solve_1d_detailed};
pub use trivial::{solve_trivial, TrivialBackend, TrivialInverse};

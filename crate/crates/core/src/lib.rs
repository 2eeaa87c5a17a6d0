//! Pseudospectral traveling-wave solver for the forced, damped shallow-water system.

pub mod continuation;
pub mod diagnostics;
pub mod error;
pub mod forward;
pub mod io;
pub mod params;
pub mod linear;
pub mod solver;
pub mod spectral;

pub use error::{Result, ShallowError};
pub use params::{nondimensionalize, Params, Physical, Regime, Scales};
pub use continuation::{limit_report, sweep, LimitNorms, LimitReport, Predictor, SweepPlan, SweepPoint};
pub use forward::{ForcingData, Residual};
pub use io::RunConfig;
pub use solver::{newton_solve, solve_1d, solve_linearized, solve_trivial, NewtonConfig, SolveReport, TrivialBackend};
pub use spectral::{Grid, SpectralField, State};

use serde::{Deserialize, Serialize};

use crate::error::{Result, ShallowError};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NewtonConfig {
    pub max_iters: usize,
    /// Threshold on the `Y_0` residual norm.
    pub abs_tol: f64,
    /// Threshold relative to the initial residual.
    pub rel_tol: f64,
    /// Backtracking factor.
    pub damping: f64,
    pub max_halvings: usize,
    pub krylov_rel_tol: f64,
    /// Krylov tolerance once the residual drops below `sqrt(abs_tol)`.
    pub krylov_final_tol: f64,
    pub krylov_max_iters: usize,
    pub krylov_restart: usize,
}

impl Default for NewtonConfig {
    fn default() -> Self {
        NewtonConfig {
            max_iters: 50,
            abs_tol: 1e-10,
            rel_tol: 1e-12,
            damping: 0.5,
            max_halvings: 20,
            krylov_rel_tol: 1e-3,
            krylov_final_tol: 1e-8,
            krylov_max_iters: 200,
            krylov_restart: 50,
        }
    }
}

impl NewtonConfig {
    pub fn validate(&self) -> Result<()> {
        let tols = [self.abs_tol, self.rel_tol, self.krylov_rel_tol, self.krylov_final_tol];
        if tols.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
            return Err(ShallowError::Config("solver tolerances must be positive".into()));
        }
        if !(self.damping > 0.0 && self.damping < 1.0) {
            return Err(ShallowError::Config(format!("damping {} outside (0, 1)", self.damping)));
        }
        if self.krylov_restart == 0 || self.krylov_max_iters == 0 {
            return Err(ShallowError::Config("krylov budgets must be positive".into()));
        }
        Ok(())
    }

    /// Krylov tolerance used at a given residual level.
    pub fn krylov_tol_at(&self, residual: f64) -> f64 {
        if residual < self.abs_tol.sqrt() {
            self.krylov_final_tol
        } else {
            self.krylov_rel_tol
        }
    }
}

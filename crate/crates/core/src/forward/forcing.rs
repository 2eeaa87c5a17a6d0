use std::sync::Arc;

use crate::error::{Result, ShallowError};
use crate::params::{Params, Regime};
use crate::spectral::ops::{dealias, gradient, product};
use crate::spectral::{Grid, SpectralField};

/// Polynomial forcing coefficients `tau_i` (matrix fields) and `phi_i` (vector fields), `i = 0..=order`.
#[derive(Clone, Debug)]
pub struct ForcingData {
    pub tau: Vec<SpectralField>,
    pub phi: Vec<SpectralField>,
}

impl ForcingData {
    pub fn zeros(grid: &Arc<Grid>, order: usize) -> Self {
        let d = grid.dim();
        ForcingData {
            tau: (0..=order).map(|_| SpectralField::zeros(grid, d * d)).collect(),
            phi: (0..=order).map(|_| SpectralField::zeros(grid, d)).collect(),
        }
    }

    pub fn new(tau: Vec<SpectralField>, phi: Vec<SpectralField>) -> Result<Self> {
        if tau.is_empty() || tau.len() != phi.len() {
            return Err(ShallowError::DimensionMismatch(format!(
                "forcing needs matching tau/phi sequences, got {} and {}",
                tau.len(),
                phi.len()
            )));
        }
        let grid = tau[0].grid().clone();
        let d = grid.dim();
        for (t, p) in tau.iter().zip(&phi) {
            if **t.grid() != *grid || **p.grid() != *grid {
                return Err(ShallowError::GridMismatch);
            }
            if t.components() != d * d || p.components() != d {
                return Err(ShallowError::DimensionMismatch("tau must be d x d and phi must have d components".into()));
            }
        }
        Ok(ForcingData { tau, phi })
    }

    /// Forcing that is independent of eta: `F = phi_0`.
    pub fn from_phi0(phi0: SpectralField) -> Self {
        let grid = phi0.grid().clone();
        let d = grid.dim();
        ForcingData { tau: vec![SpectralField::zeros(&grid, d * d)], phi: vec![phi0] }
    }

    pub fn order(&self) -> usize {
        self.tau.len() - 1
    }

    pub fn grid(&self) -> &Arc<Grid> {
        self.tau[0].grid()
    }

    pub fn scale(&self, s: f64) -> Self {
        ForcingData {
            tau: self.tau.iter().map(|t| t.scale(s)).collect(),
            phi: self.phi.iter().map(|p| p.scale(s)).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.tau.iter().chain(&self.phi).all(|f| f.max_abs() == 0.0)
    }

    /// The matrices `T_i` multiplying `grad eta` in the chosen regime.
    pub fn effective_tau(&self, params: &Params) -> Vec<SpectralField> {
        let d = self.grid().dim();
        match params.regime {
            Regime::Subsonic => self.tau.clone(),
            Regime::Omnisonic => self
                .tau
                .iter()
                .map(|t| t.trace().times_identity(d).axpy(params.mu + params.sigma, t))
                .collect(),
        }
    }
}

fn check_grid(eta: &SpectralField, data: &ForcingData) -> Result<()> {
    eta.check_grid(&data.tau[0])
}

/// Polynomial forcing `sum_i eta^i (T_i grad eta + phi_i)`, evaluated by Horner's rule with every product dealiased.
pub fn forcing_poly(eta: &SpectralField, data: &ForcingData, params: &Params) -> Result<SpectralField> {
    check_grid(eta, data)?;
    let t = effective_terms(eta, data, params);
    let mut acc = t.last().unwrap().clone();
    for ti in t.iter().rev().skip(1) {
        acc = ti.add(&product(eta, &acc));
    }
    Ok(acc)
}

fn effective_terms(eta: &SpectralField, data: &ForcingData, params: &Params) -> Vec<SpectralField> {
    let ge = gradient(eta);
    data.effective_tau(params)
        .iter()
        .zip(&data.phi)
        .map(|(tau, phi)| if tau.max_abs() == 0.0 { phi.clone() } else { dealias(&tau.mat_vec(&ge)).add(phi) })
        .collect()
}

/// Directional derivative of [`forcing_poly`] at `eta0` in direction `deta`.
pub fn forcing_poly_derivative(
    eta0: &SpectralField,
    data: &ForcingData,
    params: &Params,
    deta: &SpectralField,
) -> Result<SpectralField> {
    check_grid(eta0, data)?;
    let t = effective_terms(eta0, data, params);
    let gd = gradient(deta);
    let taus = data.effective_tau(params);
    let dt: Vec<SpectralField> = taus
        .iter()
        .map(|tau| if tau.max_abs() == 0.0 { SpectralField::zeros(eta0.grid(), gd.components()) } else { dealias(&tau.mat_vec(&gd)) })
        .collect();
    let l = t.len() - 1;
    let mut acc = t[l].clone();
    let mut dacc = dt[l].clone();
    for i in (0..l).rev() {
        dacc = dt[i].add(&dealias(&deta.mul(&acc).add(&eta0.mul(&dacc))));
        acc = t[i].add(&product(eta0, &acc));
    }
    Ok(dacc)
}

pub type Evaluator = Box<dyn Fn(&[f64], f64) -> Vec<f64> + Send + Sync>;

/// Bulk force and surface-stress evaluators sampled at `(x, y)`.
pub struct StressForcingInput {
    /// Body force, `d` components.
    pub bulk_force: Option<Evaluator>,
    /// Tangential part of the sheet stress, `d x d` components (row-major).
    pub sheet_tangential: Option<Evaluator>,
    /// Sheet stress vector, `d` components.
    pub sheet_vector: Option<Evaluator>,
    /// Normal-normal component, one value.
    pub sheet_normal: Option<Evaluator>,
    pub y_quadrature: usize,
}

impl Default for StressForcingInput {
    fn default() -> Self {
        StressForcingInput {
            bulk_force: None,
            sheet_tangential: None,
            sheet_vector: None,
            sheet_normal: None,
            y_quadrature: 64,
        }
    }
}

fn sample_at_surface(
    grid: &Arc<Grid>,
    eta: &SpectralField,
    comps: usize,
    f: &(dyn Fn(&[f64], f64) -> Vec<f64> + Send + Sync),
) -> SpectralField {
    let n = grid.len();
    let mut values = vec![0.0; n * comps];
    for p in 0..n {
        let x = grid.coords(p);
        let s = f(&x, 1.0 + eta.values()[p]);
        for c in 0..comps {
            values[c * n + p] = s[c];
        }
    }
    SpectralField::from_values(grid, comps, values)
}

/// Depth-integrated body force plus surface-stress terms, composed with `y = 1 + eta` pointwise.
pub fn forcing_from_stress(eta: &SpectralField, input: &StressForcingInput) -> Result<SpectralField> {
    let grid = eta.grid().clone();
    let d = grid.dim();
    let n = grid.len();
    let depth_min = 1.0 + eta.min();
    if depth_min <= 0.0 {
        return Err(ShallowError::NonPositiveDepth(depth_min));
    }
    let ge = gradient(eta);
    let mut total = SpectralField::zeros(&grid, d);

    if let Some(f) = &input.bulk_force {
        let m = input.y_quadrature.max(2);
        let mut values = vec![0.0; n * d];
        for p in 0..n {
            let x = grid.coords(p);
            let top = 1.0 + eta.values()[p];
            let h = top / (m - 1) as f64;
            for q in 0..m {
                let w = if q == 0 || q == m - 1 { 0.5 * h } else { h };
                let s = f(&x, q as f64 * h);
                for c in 0..d {
                    values[c * n + p] += w * s[c];
                }
            }
        }
        total = total.add(&SpectralField::from_values(&grid, d, values));
    }
    if let Some(f) = &input.sheet_tangential {
        let xi_t = sample_at_surface(&grid, eta, d * d, f.as_ref());
        total = total.add(&xi_t.mat_vec(&ge));
    }
    if let Some(f) = &input.sheet_vector {
        total = total.sub(&sample_at_surface(&grid, eta, d, f.as_ref()));
    }
    if let Some(f) = &input.sheet_normal {
        let nn = sample_at_surface(&grid, eta, 1, f.as_ref());
        total = total.sub(&nn.mul(&ge));
        total = total.sub(&eta.add_constant(1.0).mul(&gradient(&nn)));
    }
    Ok(dealias(&total))
}

/// Polynomial data reproducing a `y`-independent normal stress `g`: `F = -g grad eta - (1 + eta) grad g`.
pub fn normal_stress_as_poly(g: &SpectralField, params: &Params) -> ForcingData {
    let grid = g.grid().clone();
    let d = grid.dim();
    let tau_scale = match params.regime {
        Regime::Subsonic => 1.0,
        Regime::Omnisonic => 1.0 / (d as f64 + params.mu + params.sigma),
    };
    let tau0 = g.scale(-tau_scale).times_identity(d);
    let grad_g = gradient(g).scale(-1.0);
    ForcingData {
        tau: vec![tau0, SpectralField::zeros(&grid, d * d)],
        phi: vec![grad_g.clone(), grad_g],
    }
}

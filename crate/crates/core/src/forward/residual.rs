use std::sync::Arc;

use crate::error::{Result, ShallowError};
use crate::params::Params;
use crate::spectral::norms::y0_norm;
use crate::spectral::ops::{d_symbol, dealias, divergence, gradient, laplacian, partial, product, spectral_map, stress_s};
use crate::spectral::{Grid, SpectralField, State};

/// Mass residual `h` (scalar) and momentum residual `f` (vector).
#[derive(Clone, Debug)]
pub struct Residual {
    pub h: SpectralField,
    pub f: SpectralField,
}

impl Residual {
    pub fn zeros(grid: &Arc<Grid>) -> Self {
        Residual { h: SpectralField::zeros(grid, 1), f: SpectralField::zeros(grid, grid.dim()) }
    }

    pub fn y0_norm(&self) -> f64 {
        y0_norm(&self.h, &self.f)
    }

    pub fn add(&self, o: &Residual) -> Residual {
        Residual { h: self.h.add(&o.h), f: self.f.add(&o.f) }
    }

    pub fn sub(&self, o: &Residual) -> Residual {
        Residual { h: self.h.sub(&o.h), f: self.f.sub(&o.f) }
    }

    pub fn scale(&self, s: f64) -> Residual {
        Residual { h: self.h.scale(s), f: self.f.scale(s) }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        self.h.grid()
    }

    /// Largest entry of either component.
    pub fn max_abs(&self) -> f64 {
        self.h.max_abs().max(self.f.max_abs())
    }
}

/// `v - gamma e_1`.
pub(crate) fn shifted(v: &SpectralField, gamma: f64) -> SpectralField {
    let n = v.grid().len();
    let mut vals = v.values().to_vec();
    vals[..n].iter_mut().for_each(|x| *x -= gamma);
    SpectralField::from_values(v.grid(), v.components(), vals)
}

/// `(m . grad) v`, not dealiased.
pub(crate) fn convect(m: &SpectralField, v: &SpectralField) -> SpectralField {
    gradient(v).mat_vec(m)
}

/// `(1 - sigma^2 Lap) grad eta`.
pub(crate) fn pressure_op(eta: &SpectralField, sigma: f64) -> SpectralField {
    let d = eta.grid().dim();
    let s2 = sigma * sigma;
    spectral_map(eta, d, |_, xi, a, out| {
        let r2: f64 = xi.iter().map(|t| t * t).sum();
        let c = 1.0 + 4.0 * std::f64::consts::PI.powi(2) * s2 * r2;
        for j in 0..d {
            out[j] = c * d_symbol(xi[j]) * a[0];
        }
    })
}

/// Outer product `a (x) b` of two vector fields.
pub(crate) fn outer(a: &SpectralField, b: &SpectralField) -> SpectralField {
    let d = a.components();
    let n = a.grid().len();
    let mut out = vec![0.0; n * d * d];
    for i in 0..d {
        for j in 0..d {
            let (ai, bj) = (a.component_values(i), b.component_values(j));
            for p in 0..n {
                out[(i * d + j) * n + p] = ai[p] * bj[p];
            }
        }
    }
    SpectralField::from_values(a.grid(), d * d, out)
}

pub(crate) fn check_forcing(state: &State, forcing: &SpectralField) -> Result<()> {
    state.v.check_grid(forcing)?;
    if forcing.components() != state.dim() {
        return Err(ShallowError::DimensionMismatch("forcing must have d components".into()));
    }
    Ok(())
}

/// Residual of the traveling system with forcing supplied as a field.
pub fn residual(state: &State, params: &Params, forcing: &SpectralField) -> Result<Residual> {
    state.check_depth()?;
    check_forcing(state, forcing)?;
    let (v, eta) = (&state.v, &state.eta);
    let depth = eta.add_constant(1.0);
    let m = product(&depth, &shifted(v, params.gamma));
    let h = divergence(&m);
    let adv = dealias(&convect(&m, v));
    let visc = divergence(&product(&depth, &stress_s(v))).scale(params.mu * params.mu);
    let press = product(&depth, &pressure_op(eta, params.sigma));
    let f = adv.add(v).sub(&visc).add(&press).add(forcing);
    Ok(Residual { h, f })
}

/// Linearization at the trivial solution applied to a direction `(v, eta)`.
pub fn apply_trivial_linearization(dir: &State, params: &Params) -> Residual {
    let (v, eta) = (&dir.v, &dir.eta);
    let g = params.gamma;
    let div_v = divergence(v);
    let h = div_v.sub(&partial(eta, 0).scale(g));
    let visc = laplacian(v).add(&gradient(&div_v).scale(3.0)).scale(params.mu * params.mu);
    let f = v.sub(&partial(v, 0).scale(g)).sub(&visc).add(&pressure_op(eta, params.sigma));
    Residual { h, f }
}

use serde::{Deserialize, Serialize};

use super::field::{SpectralField, State};
use crate::error::{Result, ShallowError};
use crate::params::Params;

const MEAN_TOL: f64 = 1e-12;

fn weighted_sum(f: &SpectralField, w: impl Fn(&[f64], f64) -> f64) -> f64 {
    let grid = f.grid();
    let n = grid.len();
    let spec = f.spectrum();
    let mut total = 0.0;
    for k in 0..n {
        let xi = grid.xi(k);
        let r = grid.xi_norm(k);
        let wk = w(xi, r);
        if wk == 0.0 {
            continue;
        }
        let mut e = 0.0;
        for c in 0..f.components() {
            e += spec[c * n + k].norm_sqr();
        }
        total += wk * e;
    }
    total
}

#[inline]
fn bracket2(r: f64) -> f64 {
    1.0 + r * r
}

/// `H^s` norm with weight `<xi>^{2s}`, `<xi> = sqrt(1 + |xi|^2)`.
pub fn sobolev_norm(f: &SpectralField, s: f64) -> f64 {
    weighted_sum(f, |_, r| bracket2(r).powf(s)).sqrt()
}

/// `H^s` norm of the full tensor of k-th derivatives.
pub fn derivative_norm(f: &SpectralField, k: u32, s: f64) -> f64 {
    let tp = 2.0 * std::f64::consts::PI;
    weighted_sum(f, |_, r| (tp * r).powi(2 * k as i32) * bracket2(r).powf(s)).sqrt()
}

/// Homogeneous `H^{-1}` norm, weight `|xi|^{-2}`; the zero mode is ignored.
pub fn homogeneous_neg1_norm(f: &SpectralField) -> f64 {
    weighted_sum(f, |_, r| if r > 0.0 { 1.0 / (r * r) } else { 0.0 }).sqrt()
}

/// Squared weight of the anisotropic space at a nonzero frequency.
pub fn aniso_weight(xi: &[f64], s: f64) -> f64 {
    let r2: f64 = xi.iter().map(|x| x * x).sum();
    if r2 == 0.0 {
        0.0
    } else if r2 < 1.0 {
        (r2 * r2 + xi[0] * xi[0]) / r2
    } else {
        (1.0 + r2).powf(s)
    }
}

fn relative_mean(f: &SpectralField) -> f64 {
    let total = f.spectrum().iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    if total == 0.0 {
        0.0
    } else {
        f.spectrum()[0].norm() / total
    }
}

/// Anisotropic norm of a zero-mean scalar field.
pub fn aniso_norm(eta: &SpectralField, s: f64) -> Result<f64> {
    let m = relative_mean(eta);
    if m > MEAN_TOL {
        return Err(ShallowError::NonZeroMean(m));
    }
    Ok(aniso_norm_unchecked(eta, s))
}

/// Anisotropic norm that ignores the zero mode.
pub fn aniso_norm_unchecked(eta: &SpectralField, s: f64) -> f64 {
    weighted_sum(eta, |xi, _| aniso_weight(xi, s)).sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamNorms {
    /// `(|v|_{H^s}^2 + mu^4 |v|_{H^{s+2}}^2)^{1/2}`
    pub mu_v: f64,
    /// `(|eta|_s^2 + sigma^4 |eta|_{s+2}^2)^{1/2}` in the anisotropic scale.
    pub sigma_eta: f64,
    /// The mixed norm adding `(mu^2+sigma^2)(|eta|_{s+1}^2 + sigma^4 |eta|_{s+3}^2)`.
    pub mu_sigma_eta: f64,
}

pub fn param_norms(state: &State, params: &Params, s: f64) -> ParamNorms {
    let (mu, sigma) = (params.mu, params.sigma);
    let v0 = sobolev_norm(&state.v, s).powi(2);
    let v2 = sobolev_norm(&state.v, s + 2.0).powi(2);
    let e = |t: f64| aniso_norm_unchecked(&state.eta, s + t).powi(2);
    let (e0, e1, e2, e3) = (e(0.0), e(1.0), e(2.0), e(3.0));
    let s4 = sigma.powi(4);
    ParamNorms {
        mu_v: (v0 + mu.powi(4) * v2).sqrt(),
        sigma_eta: (e0 + s4 * e2).sqrt(),
        mu_sigma_eta: (e0 + s4 * e2 + (mu * mu + sigma * sigma) * (e1 + s4 * e3)).sqrt(),
    }
}

/// `(|v|_{L^2}^2 + |eta|_{aniso,0}^2)^{1/2}`.
pub fn x0_norm(state: &State) -> f64 {
    (sobolev_norm(&state.v, 0.0).powi(2) + aniso_norm_unchecked(&state.eta, 0.0).powi(2)).sqrt()
}

/// `(|h|_{dot H^-1}^2 + |h|_{H^1}^2 + |f|_{L^2}^2)^{1/2}`.
pub fn y0_norm(h: &SpectralField, f: &SpectralField) -> f64 {
    (homogeneous_neg1_norm(h).powi(2) + sobolev_norm(h, 1.0).powi(2) + sobolev_norm(f, 0.0).powi(2)).sqrt()
}

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, ShallowError};
use crate::forward::Residual;
use crate::linear::{chi_symbol, trivial_symbol_matrix};
use crate::params::Params;
use crate::spectral::ops::{apply_multiplier, leray_project, riesz, spectral_map, I};
use crate::spectral::{Grid, SpectralField, State};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const MEAN_TOL: f64 = 1e-12;
const COND_LIMIT: f64 = 1e14;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrivialBackend {
    /// Gradient/solenoidal decoupling with the scalar free-surface symbol.
    Decoupled,
    /// Per-mode inversion of the full matrix symbol.
    #[default]
    MatrixSymbol,
}

/// Inverts a small dense complex matrix by Gauss-Jordan elimination with partial pivoting.
fn invert(m: &[Complex64], n: usize) -> Option<Vec<Complex64>> {
    let mut a = m.to_vec();
    let mut inv = vec![ZERO; n * n];
    for i in 0..n {
        inv[i * n + i] = Complex64::new(1.0, 0.0);
    }
    for col in 0..n {
        let piv = (col..n).max_by(|&x, &y| a[x * n + col].norm().total_cmp(&a[y * n + col].norm()))?;
        if a[piv * n + col].norm() == 0.0 {
            return None;
        }
        if piv != col {
            for j in 0..n {
                a.swap(piv * n + j, col * n + j);
                inv.swap(piv * n + j, col * n + j);
            }
        }
        let p = a[col * n + col].inv();
        for j in 0..n {
            a[col * n + j] *= p;
            inv[col * n + j] *= p;
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let f = a[r * n + col];
            if f == ZERO {
                continue;
            }
            for j in 0..n {
                let (ac, ic) = (a[col * n + j], inv[col * n + j]);
                a[r * n + j] -= f * ac;
                inv[r * n + j] -= f * ic;
            }
        }
    }
    Some(inv)
}

fn inf_norm(m: &[Complex64], n: usize) -> f64 {
    (0..n).map(|i| (0..n).map(|j| m[i * n + j].norm()).sum::<f64>()).fold(0.0, f64::max)
}

fn relative_mean(h: &SpectralField) -> f64 {
    let spec = h.spectrum();
    let total = spec.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    if total == 0.0 {
        0.0
    } else {
        spec[0].norm() / total
    }
}

/// Precomputed per-mode inverses of the trivial linearization.
pub struct TrivialInverse {
    grid: Arc<Grid>,
    params: Params,
    inverses: Vec<Complex64>,
}

impl TrivialInverse {
    pub fn new(grid: &Arc<Grid>, params: &Params) -> Result<Self> {
        Self::build(grid, params, false)
    }

    /// Inverse of the dealiased discrete linearization at zero: above the dealiasing cutoff only `f = v` survives,
    /// so those modes map `v = f`, `eta = 0`.
    pub fn dealiased(grid: &Arc<Grid>, params: &Params) -> Result<Self> {
        Self::build(grid, params, true)
    }

    fn build(grid: &Arc<Grid>, params: &Params, dealiased: bool) -> Result<Self> {
        params.validate()?;
        let d = grid.dim();
        let n = d + 1;
        let mut inverses = vec![ZERO; grid.len() * n * n];
        for k in 0..grid.len() {
            let block = &mut inverses[k * n * n..(k + 1) * n * n];
            if grid.xi_norm(k) == 0.0 || (dealiased && !grid.is_retained(k)) {
                for i in 0..d {
                    block[i * n + i] = Complex64::new(1.0, 0.0);
                }
                continue;
            }
            let xi = grid.xi(k);
            let m = trivial_symbol_matrix(xi, params);
            let singular = || ShallowError::SingularSymbol { xi: xi.to_vec(), cond: f64::INFINITY };
            let inv = invert(&m, n).ok_or_else(singular)?;
            let cond = inf_norm(&m, n) * inf_norm(&inv, n);
            if !(cond <= COND_LIMIT) {
                return Err(ShallowError::SingularSymbol { xi: xi.to_vec(), cond });
            }
            block.copy_from_slice(&inv);
        }
        Ok(TrivialInverse { grid: grid.clone(), params: *params, inverses })
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    /// Applies the inverse without checking the mean of `h`; the mean of `h` is ignored.
    pub fn apply_unchecked(&self, h: &SpectralField, f: &SpectralField) -> State {
        let d = self.grid.dim();
        let n = d + 1;
        let stacked = SpectralField::stack(&[f, h]);
        let out = spectral_map(&stacked, n, |k, _, a, o| {
            let m = &self.inverses[k * n * n..(k + 1) * n * n];
            for i in 0..n {
                o[i] = (0..n).map(|j| m[i * n + j] * a[j]).sum();
            }
        });
        let comps: Vec<SpectralField> = (0..d).map(|c| out.component(c)).collect();
        let refs: Vec<&SpectralField> = comps.iter().collect();
        State { v: SpectralField::stack(&refs), eta: out.component(d) }
    }

    pub fn apply(&self, rhs: &Residual) -> Result<State> {
        rhs.h.check_grid(&rhs.f)?;
        if **rhs.h.grid() != *self.grid {
            return Err(ShallowError::GridMismatch);
        }
        let m = relative_mean(&rhs.h);
        if m > MEAN_TOL {
            return Err(ShallowError::NonZeroMeanData(m));
        }
        Ok(self.apply_unchecked(&rhs.h, &rhs.f))
    }
}

fn solve_decoupled(h: &SpectralField, f: &SpectralField, params: &Params) -> Result<State> {
    let grid = h.grid().clone();
    let d = grid.dim();
    let (g, mu) = (params.gamma, params.mu);
    let r2 = |xi: &[f64]| xi.iter().map(|x| x * x).sum::<f64>();
    // H = grad Lap^{-1} h
    let big_h = spectral_map(h, d, |_, xi, a, o| {
        let s = r2(xi);
        if s == 0.0 {
            return;
        }
        for j in 0..d {
            o[j] = -I * (xi[j] / (2.0 * PI * s)) * a[0];
        }
    });
    let grad_op = |mu2: f64| {
        move |xi: &[f64]| Complex64::new(1.0 + 4.0 * PI * PI * mu2 * r2(xi), -2.0 * PI * g * xi[0])
    };
    let pf = leray_project(f);
    let qf = f.sub(&pf);
    let phi = qf.sub(&apply_multiplier(&big_h, grad_op(4.0 * mu * mu), ZERO)?);
    let mut rphi = SpectralField::zeros(&grid, 1);
    for j in 0..d {
        rphi = rphi.add(&riesz(j, &phi.component(j)));
    }
    let eta = apply_multiplier(&rphi, |xi| chi_symbol(xi, params).map(|c| c.inv()).unwrap_or(ZERO), ZERO)?;
    let pv = apply_multiplier(&pf, |xi| grad_op(mu * mu)(xi).inv(), Complex64::new(1.0, 0.0))?;
    let r1eta = riesz(0, &eta);
    let mut rr = Vec::with_capacity(d);
    for j in 0..d {
        rr.push(riesz(j, &r1eta));
    }
    let refs: Vec<&SpectralField> = rr.iter().collect();
    let qv = big_h.axpy(-g, &SpectralField::stack(&refs));
    Ok(State { v: pv.add(&qv), eta })
}

/// Solves the trivial linearization `apply_trivial_linearization(v, eta) = (h, f)` with zero-mean `eta`.
pub fn solve_trivial(h: &SpectralField, f: &SpectralField, params: &Params, backend: TrivialBackend) -> Result<State> {
    h.check_grid(f)?;
    let d = h.grid().dim();
    if h.components() != 1 || f.components() != d {
        return Err(ShallowError::DimensionMismatch("need scalar h and d-component f".into()));
    }
    let m = relative_mean(h);
    if m > MEAN_TOL {
        return Err(ShallowError::NonZeroMeanData(m));
    }
    match backend {
        TrivialBackend::MatrixSymbol => {
            let inv = TrivialInverse::new(h.grid(), params)?;
            Ok(inv.apply_unchecked(h, f))
        }
        TrivialBackend::Decoupled => {
            params.validate()?;
            solve_decoupled(h, f, params)
        }
    }
}

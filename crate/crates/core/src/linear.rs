//! Closed-form symbols of the trivial linearization, ellipticity table, dispersion and 1D multipliers.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, ShallowError};
use crate::params::Params;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn norm2(xi: &[f64]) -> f64 {
    xi.iter().map(|x| x * x).sum()
}

/// Matrix symbol of the trivial linearization, rows `(f_1..f_d, h)`, columns `(v_1..v_d, eta)`.
pub fn trivial_symbol_matrix(xi: &[f64], params: &Params) -> Vec<Complex64> {
    let d = xi.len();
    let n = d + 1;
    let (g, mu, sigma) = (params.gamma, params.mu, params.sigma);
    let r2 = norm2(xi);
    let a1 = c(0.0, 2.0 * PI * xi[0]);
    let diag = 1.0 - g * a1 + 4.0 * PI * PI * mu * mu * r2;
    let grad_coeff = 1.0 + 4.0 * PI * PI * sigma * sigma * r2;
    let mut m = vec![c(0.0, 0.0); n * n];
    for i in 0..d {
        for j in 0..d {
            m[i * n + j] = c(12.0 * PI * PI * mu * mu * xi[i] * xi[j], 0.0);
        }
        m[i * n + i] += diag;
        m[i * n + d] = grad_coeff * c(0.0, 2.0 * PI * xi[i]);
        m[d * n + i] = c(0.0, 2.0 * PI * xi[i]);
    }
    m[d * n + d] = -g * a1;
    m
}

/// Determinant of the trivial linearization's symbol.
pub fn detp_symbol(xi: &[f64], params: &Params, dim: usize) -> Complex64 {
    assert!(dim >= 1 && xi.len() == dim);
    let (g, mu, sigma) = (params.gamma, params.mu, params.sigma);
    let r2 = norm2(xi);
    let a1 = c(0.0, 2.0 * PI * xi[0]);
    let alpha = 1.0 - g * a1 + 4.0 * PI * PI * mu * mu * r2;
    let beta = g * g * a1 * a1 + 4.0 * PI * PI * r2 + 16.0 * PI.powi(4) * sigma * sigma * r2 * r2
        - g * a1 * (1.0 + 16.0 * PI * PI * mu * mu * r2);
    alpha.powi(dim as i32 - 1) * beta
}

/// Lower bound `pi |xi|^2 / <2 pi gamma xi_1> + 2 pi gamma |xi_1|` for `|det P|`.
pub fn detp_lower_bound(xi: &[f64], params: &Params) -> f64 {
    let g = params.gamma;
    let t = 2.0 * PI * g * xi[0];
    PI * norm2(xi) / (1.0 + t * t).sqrt() + 2.0 * PI * g * xi[0].abs()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Pattern {
    ViscousCapillary,
    Viscous,
    Capillary,
    Inviscid,
}

impl Pattern {
    pub fn of(params: &Params) -> Pattern {
        match (params.mu > 0.0, params.sigma > 0.0) {
            (true, true) => Pattern::ViscousCapillary,
            (true, false) => Pattern::Viscous,
            (false, true) => Pattern::Capillary,
            (false, false) => Pattern::Inviscid,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymbolReport {
    pub params: Params,
    pub dim: usize,
    #[serde(rename = "R")]
    pub big_r: u32,
    pub r: u32,
    pub principal_part: String,
    pub elliptic: bool,
}

impl SymbolReport {
    pub fn summary_line(&self) -> String {
        format!(
            "elliptic: {}, r={}, principal: {}",
            if self.elliptic { "yes" } else { "no" },
            self.r,
            self.principal_part
        )
    }
}

fn power(base: &str, e: usize) -> String {
    match e {
        0 => String::new(),
        1 => base.to_string(),
        _ => format!("{base}^{e}"),
    }
}

fn join(factors: &[String]) -> String {
    let parts: Vec<&str> = factors.iter().map(|s| s.as_str()).filter(|s| !s.is_empty()).collect();
    parts.join("*")
}

/// Ellipticity classification of the traveling system at `params` in dimension `dim`.
pub fn adn_classify(params: &Params, dim: usize) -> SymbolReport {
    assert!(dim >= 1);
    let d = dim as u32;
    let sonic = params.gamma == 1.0;
    let (big_r, r, principal, elliptic) = match Pattern::of(params) {
        Pattern::ViscousCapillary => (
            2 * d + 2,
            2 * d + 2,
            join(&["sigma^2*Lap^2".into(), power("(-mu^2*Lap)", dim - 1)]),
            true,
        ),
        Pattern::Viscous => (2 * d + 1, 2 * d + 1, join(&["-4*gamma*d1".into(), power("(-mu^2*Lap)", dim)]), dim == 1),
        Pattern::Capillary => (
            d + 3,
            d + 3,
            join(&[power("(-gamma*d1)", dim - 1), "sigma^2*Lap^2".into()]),
            dim == 1,
        ),
        Pattern::Inviscid => {
            if dim >= 2 {
                (d + 1, d + 1, join(&[power("(-gamma*d1)", dim - 1), "(gamma^2*d1^2-Lap)".into()]), false)
            } else if sonic {
                (2, 1, "-d1".into(), false)
            } else {
                (2, 2, "(gamma^2-1)*d1^2".into(), true)
            }
        }
    };
    SymbolReport { params: *params, dim, big_r, r, principal_part: principal, elliptic }
}

/// Symbol of the principal part named by [`adn_classify`].
pub fn principal_symbol(params: &Params, dim: usize, xi: &[f64]) -> Complex64 {
    let (g, mu, sigma) = (params.gamma, params.mu, params.sigma);
    let r2 = norm2(xi);
    let d1 = c(0.0, 2.0 * PI * xi[0]);
    let lap = c(-4.0 * PI * PI * r2, 0.0);
    let minus_mu_lap = -mu * mu * lap;
    let e = dim as i32;
    match Pattern::of(params) {
        Pattern::ViscousCapillary => sigma * sigma * lap * lap * minus_mu_lap.powi(e - 1),
        Pattern::Viscous => -4.0 * g * d1 * minus_mu_lap.powi(e),
        Pattern::Capillary => (-g * d1).powi(e - 1) * sigma * sigma * lap * lap,
        Pattern::Inviscid => {
            if dim >= 2 {
                (-g * d1).powi(e - 1) * (g * g * d1 * d1 - lap)
            } else if g == 1.0 {
                -d1
            } else {
                (g * g - 1.0) * d1 * d1
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DispersionSample {
    pub xi: Vec<f64>,
    pub omega: f64,
    pub phase_speed: f64,
    pub group_speed: f64,
}

/// Linear gravity-capillary dispersion `omega = |xi| sqrt(1 + 4 pi^2 sigma^2 |xi|^2)`.
pub fn dispersion(xi: &[f64], sigma: f64) -> DispersionSample {
    let r = norm2(xi).sqrt();
    let a = 4.0 * PI * PI * sigma * sigma;
    let root = (1.0 + a * r * r).sqrt();
    let omega = r * root;
    let (phase_speed, group_speed) = if r == 0.0 { (0.0, 0.0) } else { (root, (1.0 + 2.0 * a * r * r) / root) };
    DispersionSample { xi: xi.to_vec(), omega, phase_speed, group_speed }
}

/// Symbol of the scalar operator that determines the free surface in the decoupled system.
pub fn chi_symbol(xi: &[f64], params: &Params) -> Result<Complex64> {
    let r2 = norm2(xi);
    if r2 == 0.0 {
        return Err(ShallowError::ZeroFrequency);
    }
    let (g, mu, sigma) = (params.gamma, params.mu, params.sigma);
    let r = r2.sqrt();
    let im = g * (1.0 + 16.0 * PI * PI * mu * mu * r2) * xi[0] / r;
    let re = -2.0 * PI * (1.0 - g * g * xi[0] * xi[0] / r2 + 4.0 * PI * PI * sigma * sigma * r2) * r;
    Ok(c(re, im))
}

/// Both sides `(lhs, rhs)` of the lower estimate for `|chi|`.
pub fn chi_inequality_sides(xi: &[f64], params: &Params) -> Result<(f64, f64)> {
    let chi = chi_symbol(xi, params)?;
    let (g, mu, sigma) = (params.gamma, params.mu, params.sigma);
    let r2 = norm2(xi);
    let r = r2.sqrt();
    let visc = 1.0 + 16.0 * PI * PI * mu * mu * r2;
    let lhs = (2.0 + 2.0 * PI * g * xi[0].abs() / visc) * chi.norm();
    let rhs = g * visc * xi[0].abs() / r + 2.0 * PI * (1.0 + 4.0 * PI * PI * sigma * sigma * r2) * r;
    Ok((lhs, rhs))
}

/// Symbol of the linearized reduced free-surface equation in one dimension.
pub fn m_symbol_1d(xi: f64, params: &Params) -> Complex64 {
    let (g, mu, sigma) = (params.gamma, params.mu, params.sigma);
    let re = g * (1.0 + 16.0 * PI * PI * mu * mu * xi * xi);
    let im = 2.0 * PI * xi * ((1.0 - g * g) + 4.0 * PI * PI * sigma * sigma * xi * xi);
    c(re, im)
}

fn bracket(t: f64) -> f64 {
    (1.0 + t * t).sqrt()
}

/// Reparameterization symbols for the three 1D cases.
pub fn p_symbol_1d(case: u8, xi: f64, params: &Params) -> Result<f64> {
    let m = bracket(params.mu * xi).powi(2);
    let s = bracket(params.sigma * xi);
    match case {
        1 => Ok(m + bracket(xi) * s * s),
        2 => Ok(m + bracket(xi)),
        3 => Ok(m + (s + bracket(params.mu * xi)) * s * s),
        _ => Err(ShallowError::InvalidCase { case, gamma: params.gamma, mu: params.mu, sigma: params.sigma }),
    }
}

/// The 1D cases admissible at `params`.
pub fn region_of(params: &Params) -> Vec<u8> {
    let (g, mu, sigma) = (params.gamma, params.mu, params.sigma);
    let mut out = Vec::new();
    if g < 1.0 {
        out.push(1);
    }
    if g > 1.0 && sigma == 0.0 {
        out.push(2);
    }
    if g > 1.0 && mu + sigma > 0.0 {
        out.push(3);
    }
    out
}

/// `n` magnitudes log-spaced over `[lo, hi]`.
pub fn log_spaced(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1).max(1) as f64).exp()).collect()
}

/// Deterministic frequency samples: log-spaced magnitudes along quasi-random directions.
pub fn sample_frequencies(dim: usize, lo: f64, hi: f64, n: usize) -> Vec<Vec<f64>> {
    let golden = 0.618_033_988_749_894_9;
    let plastic = 0.754_877_666_246_692_7;
    log_spaced(lo, hi, n)
        .into_iter()
        .enumerate()
        .map(|(i, r)| {
            let u = (i as f64 * golden).fract();
            let w = (i as f64 * plastic).fract();
            match dim {
                1 => vec![if i % 2 == 0 { r } else { -r }],
                2 => {
                    let t = 2.0 * PI * u;
                    vec![r * t.cos(), r * t.sin()]
                }
                _ => {
                    let z = 2.0 * u - 1.0;
                    let t = 2.0 * PI * w;
                    let s = (1.0 - z * z).sqrt();
                    let mut v = vec![r * z, r * s * t.cos(), r * s * t.sin()];
                    v.resize(dim, 0.0);
                    v
                }
            }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub samples: usize,
    pub violations: usize,
    /// Smallest observed `lhs / rhs`.
    pub min_ratio: f64,
    pub worst_xi: Vec<f64>,
}

impl BoundCheck {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }

    fn collect(samples: impl Iterator<Item = (Vec<f64>, f64, f64)>) -> BoundCheck {
        let mut out = BoundCheck { samples: 0, violations: 0, min_ratio: f64::INFINITY, worst_xi: Vec::new() };
        for (xi, lhs, rhs) in samples {
            out.samples += 1;
            if lhs < rhs {
                out.violations += 1;
            }
            let ratio = lhs / rhs;
            if ratio < out.min_ratio {
                out.min_ratio = ratio;
                out.worst_xi = xi;
            }
        }
        out
    }
}

pub fn check_chi_bound(params: &Params, freqs: &[Vec<f64>]) -> BoundCheck {
    BoundCheck::collect(freqs.iter().map(|xi| {
        let (l, r) = chi_inequality_sides(xi, params).expect("nonzero sample");
        (xi.clone(), l, r)
    }))
}

pub fn check_detp_bound(params: &Params, freqs: &[Vec<f64>]) -> BoundCheck {
    BoundCheck::collect(
        freqs
            .iter()
            .map(|xi| (xi.clone(), detp_symbol(xi, params, xi.len()).norm(), detp_lower_bound(xi, params))),
    )
}

/// Extremes of `|m / p^case|` over the given 1D frequencies.
pub fn multiplier_ratio_range(case: u8, params: &Params, freqs: &[f64]) -> Result<(f64, f64)> {
    let mut lo = f64::INFINITY;
    let mut hi: f64 = 0.0;
    for &xi in freqs {
        let q = m_symbol_1d(xi, params).norm() / p_symbol_1d(case, xi, params)?;
        lo = lo.min(q);
        hi = hi.max(q);
    }
    Ok((lo, hi))
}

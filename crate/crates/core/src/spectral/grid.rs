use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::error::{Result, ShallowError};

pub const DEFAULT_DEALIAS: f64 = 2.0 / 3.0;

struct AxisPlan {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

/// Periodic box `[0, L_1) x ... x [0, L_d)` sampled row-major (last axis fastest).
pub struct Grid {
    extent: Vec<f64>,
    points: Vec<usize>,
    dealias_fraction: f64,
    plans: Vec<AxisPlan>,
    freqs: Vec<f64>,
    true_norm: Vec<f64>,
    mirror: Vec<usize>,
    retained: Vec<bool>,
    nyquist: Vec<bool>,
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("extent", &self.extent)
            .field("points", &self.points)
            .field("dealias_fraction", &self.dealias_fraction)
            .finish()
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.extent == other.extent
            && self.points == other.points
            && self.dealias_fraction == other.dealias_fraction
    }
}

fn wavenumber(i: usize, n: usize) -> i64 {
    if i < n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

impl Grid {
    pub fn new(extent: &[f64], points: &[usize]) -> Result<Arc<Grid>> {
        Self::with_dealias(extent, points, DEFAULT_DEALIAS)
    }

    pub fn with_dealias(extent: &[f64], points: &[usize], dealias_fraction: f64) -> Result<Arc<Grid>> {
        let dim = extent.len();
        if dim == 0 || dim > 2 || points.len() != dim {
            return Err(ShallowError::InvalidGrid(format!(
                "need 1 or 2 axes with matching extents and point counts, got {} and {}",
                extent.len(),
                points.len()
            )));
        }
        for (&l, &n) in extent.iter().zip(points) {
            if !(l.is_finite() && l > 0.0) {
                return Err(ShallowError::InvalidGrid(format!("extent {l} must be positive")));
            }
            if n < 8 || n % 2 != 0 {
                return Err(ShallowError::InvalidGrid(format!("point count {n} must be even and >= 8")));
            }
        }
        if !(dealias_fraction > 0.0 && dealias_fraction <= 1.0) {
            return Err(ShallowError::InvalidGrid(format!(
                "dealias fraction {dealias_fraction} outside (0, 1]"
            )));
        }

        let mut planner = FftPlanner::new();
        let plans = points
            .iter()
            .map(|&n| AxisPlan { forward: planner.plan_fft_forward(n), inverse: planner.plan_fft_inverse(n) })
            .collect();

        let len: usize = points.iter().product();
        let mut freqs = vec![0.0; len * dim];
        let mut true_norm = vec![0.0; len];
        let mut mirror = vec![0; len];
        let mut retained = vec![true; len];
        let mut nyquist = vec![false; len];
        let mut idx = vec![0usize; dim];
        for flat in 0..len {
            let mut rem = flat;
            for a in (0..dim).rev() {
                idx[a] = rem % points[a];
                rem /= points[a];
            }
            let mut m = 0;
            for a in 0..dim {
                let n = points[a];
                let k = wavenumber(idx[a], n);
                let xi = k as f64 / extent[a];
                true_norm[flat] += xi * xi;
                if idx[a] != n / 2 {
                    freqs[flat * dim + a] = xi;
                }
                if (k.unsigned_abs() as f64) > dealias_fraction * (n as f64) / 2.0 {
                    retained[flat] = false;
                }
                if idx[a] == n / 2 {
                    nyquist[flat] = true;
                }
                m = m * n + (n - idx[a]) % n;
            }
            mirror[flat] = m;
            true_norm[flat] = true_norm[flat].sqrt();
        }

        Ok(Arc::new(Grid {
            extent: extent.to_vec(),
            points: points.to_vec(),
            dealias_fraction,
            plans,
            freqs,
            true_norm,
            mirror,
            retained,
            nyquist,
        }))
    }

    pub fn dim(&self) -> usize {
        self.extent.len()
    }

    pub fn extent(&self) -> &[f64] {
        &self.extent
    }

    pub fn points(&self) -> &[usize] {
        &self.points
    }

    pub fn dealias_fraction(&self) -> f64 {
        self.dealias_fraction
    }

    /// Total number of samples.
    pub fn len(&self) -> usize {
        self.points.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn volume(&self) -> f64 {
        self.extent.iter().product()
    }

    /// Quadrature weight of one sample.
    pub fn cell_volume(&self) -> f64 {
        self.volume() / self.len() as f64
    }

    /// Frequency vector (cycles per unit length) of a flat spectral index, used for symbol evaluation.
    ///
    /// A Nyquist wavenumber `-N/2` has no sine partner on the grid, so its axis entry is set to 0.
    /// Every multiplier with `s(-xi) = conj(s(xi))` then maps real fields to real fields exactly.
    pub fn xi(&self, flat: usize) -> &[f64] {
        let d = self.dim();
        &self.freqs[flat * d..(flat + 1) * d]
    }

    pub fn xi_norm(&self, flat: usize) -> f64 {
        self.xi(flat).iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// `|k / L|` including Nyquist entries, for sharp spectral cutoffs.
    pub fn wavenumber_norm(&self, flat: usize) -> f64 {
        self.true_norm[flat]
    }

    /// Flat index of the frequency `-xi`.
    pub fn mirror(&self, flat: usize) -> usize {
        self.mirror[flat]
    }

    pub fn is_retained(&self, flat: usize) -> bool {
        self.retained[flat]
    }

    /// True if any axis sits at its Nyquist wavenumber `-N/2`.
    pub fn is_nyquist(&self, flat: usize) -> bool {
        self.nyquist[flat]
    }

    /// Physical coordinates of a flat sample index.
    pub fn coords(&self, flat: usize) -> Vec<f64> {
        let d = self.dim();
        let mut x = vec![0.0; d];
        let mut rem = flat;
        for a in (0..d).rev() {
            let i = rem % self.points[a];
            rem /= self.points[a];
            x[a] = i as f64 * self.extent[a] / self.points[a] as f64;
        }
        x
    }

    /// Smallest nonzero frequency magnitude on the grid.
    pub fn min_frequency(&self) -> f64 {
        self.extent.iter().map(|l| 1.0 / l).fold(f64::INFINITY, f64::min)
    }

    /// Largest per-axis frequency magnitude `N_j / (2 L_j)`.
    pub fn nyquist_frequency(&self) -> f64 {
        self.extent
            .iter()
            .zip(&self.points)
            .map(|(l, &n)| n as f64 / (2.0 * l))
            .fold(0.0, f64::max)
    }

    fn transform(&self, data: &mut [Complex64], inverse: bool) {
        let plan = |a: usize| if inverse { &self.plans[a].inverse } else { &self.plans[a].forward };
        match self.dim() {
            1 => plan(0).process(data),
            _ => {
                let (n0, n1) = (self.points[0], self.points[1]);
                let rows = plan(1);
                data.par_chunks_mut(n1 * 16).for_each(|chunk| rows.process(chunk));
                let mut t = vec![Complex64::new(0.0, 0.0); n0 * n1];
                transpose(data, &mut t, n0, n1);
                let cols = plan(0);
                t.par_chunks_mut(n0 * 16).for_each(|chunk| cols.process(chunk));
                transpose(&t, data, n1, n0);
            }
        }
    }

    /// Unitary forward transform: `sqrt(V)/N * DFT`.
    pub fn forward(&self, values: &[f64]) -> Vec<Complex64> {
        let mut data: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.transform(&mut data, false);
        let scale = self.volume().sqrt() / self.len() as f64;
        data.iter_mut().for_each(|c| *c *= scale);
        data
    }

    /// Inverse of [`Grid::forward`], returning the real part.
    pub fn inverse(&self, spectrum: &[Complex64]) -> Vec<f64> {
        let mut data = spectrum.to_vec();
        self.transform(&mut data, true);
        let scale = 1.0 / self.volume().sqrt();
        data.iter().map(|c| c.re * scale).collect()
    }

    /// Projects a spectrum onto the spectra of real fields.
    pub fn hermitian_project(&self, spectrum: &mut [Complex64]) {
        let src = spectrum.to_vec();
        for (k, c) in spectrum.iter_mut().enumerate() {
            *c = 0.5 * (src[k] + src[self.mirror[k]].conj());
        }
    }
}

fn transpose(src: &[Complex64], dst: &mut [Complex64], rows: usize, cols: usize) {
    const B: usize = 32;
    for rb in (0..rows).step_by(B) {
        for cb in (0..cols).step_by(B) {
            for r in rb..(rb + B).min(rows) {
                for c in cb..(cb + B).min(cols) {
                    dst[c * rows + r] = src[r * cols + c];
                }
            }
        }
    }
}

use std::sync::{Arc, OnceLock};

use num_complex::Complex64;

use super::grid::Grid;
use crate::error::{Result, ShallowError};

/// Real multi-component field on a periodic grid with a lazily cached unitary spectrum.
///
/// Components are stored as consecutive blocks. Matrix fields use row-major
/// component order, so entry `(i, j)` lives in component `i * d + j`.
#[derive(Clone)]
pub struct SpectralField {
    grid: Arc<Grid>,
    components: usize,
    values: Vec<f64>,
    spectrum: OnceLock<Vec<Complex64>>,
}

impl std::fmt::Debug for SpectralField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpectralField")
            .field("grid", &self.grid)
            .field("components", &self.components)
            .field("max_abs", &self.max_abs())
            .finish()
    }
}

impl SpectralField {
    pub fn zeros(grid: &Arc<Grid>, components: usize) -> Self {
        Self::from_values(grid, components, vec![0.0; grid.len() * components])
    }

    pub fn from_values(grid: &Arc<Grid>, components: usize, values: Vec<f64>) -> Self {
        assert!(components >= 1);
        assert_eq!(values.len(), grid.len() * components, "sample count does not match grid");
        SpectralField { grid: grid.clone(), components, values, spectrum: OnceLock::new() }
    }

    /// `f(x, out)` fills the `components` values at point `x`.
    pub fn from_fn(grid: &Arc<Grid>, components: usize, f: impl Fn(&[f64], &mut [f64])) -> Self {
        let n = grid.len();
        let mut values = vec![0.0; n * components];
        let mut out = vec![0.0; components];
        for p in 0..n {
            let x = grid.coords(p);
            f(&x, &mut out);
            for c in 0..components {
                values[c * n + p] = out[c];
            }
        }
        Self::from_values(grid, components, values)
    }

    pub fn scalar_from_fn(grid: &Arc<Grid>, f: impl Fn(&[f64]) -> f64) -> Self {
        Self::from_fn(grid, 1, |x, out| out[0] = f(x))
    }

    pub fn constant(grid: &Arc<Grid>, components: usize, value: f64) -> Self {
        Self::from_values(grid, components, vec![value; grid.len() * components])
    }

    /// Builds a field from its spectrum after projecting onto real-field spectra.
    pub fn from_spectrum(grid: &Arc<Grid>, components: usize, mut spectrum: Vec<Complex64>) -> Self {
        let n = grid.len();
        assert_eq!(spectrum.len(), n * components);
        let mut values = Vec::with_capacity(n * components);
        for c in 0..components {
            let block = &mut spectrum[c * n..(c + 1) * n];
            grid.hermitian_project(block);
            values.extend(grid.inverse(block));
        }
        let field = Self::from_values(grid, components, values);
        let _ = field.spectrum.set(spectrum);
        field
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn component_values(&self, c: usize) -> &[f64] {
        let n = self.grid.len();
        &self.values[c * n..(c + 1) * n]
    }

    pub fn component(&self, c: usize) -> SpectralField {
        let mut f = Self::from_values(&self.grid, 1, self.component_values(c).to_vec());
        if let Some(s) = self.spectrum.get() {
            let n = self.grid.len();
            let _ = f.spectrum.set(s[c * n..(c + 1) * n].to_vec());
        }
        f.components = 1;
        f
    }

    /// Concatenates the components of several fields.
    pub fn stack(fields: &[&SpectralField]) -> SpectralField {
        let grid = fields[0].grid.clone();
        let mut values = Vec::new();
        let mut comps = 0;
        for f in fields {
            assert!(*f.grid == *grid, "stacking fields on different grids");
            values.extend_from_slice(&f.values);
            comps += f.components;
        }
        Self::from_values(&grid, comps, values)
    }

    /// Unitary spectrum of all components, computed once.
    pub fn spectrum(&self) -> &[Complex64] {
        self.spectrum.get_or_init(|| {
            let n = self.grid.len();
            let mut out = Vec::with_capacity(n * self.components);
            for c in 0..self.components {
                out.extend(self.grid.forward(&self.values[c * n..(c + 1) * n]));
            }
            out
        })
    }

    pub fn component_spectrum(&self, c: usize) -> &[Complex64] {
        let n = self.grid.len();
        &self.spectrum()[c * n..(c + 1) * n]
    }

    pub fn check_grid(&self, other: &SpectralField) -> Result<()> {
        if Arc::ptr_eq(&self.grid, &other.grid) || *self.grid == *other.grid {
            Ok(())
        } else {
            Err(ShallowError::GridMismatch)
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> SpectralField {
        Self::from_values(&self.grid, self.components, self.values.iter().map(|&v| f(v)).collect())
    }

    fn zip(&self, other: &SpectralField, f: impl Fn(f64, f64) -> f64) -> SpectralField {
        assert_eq!(self.components, other.components, "component count mismatch");
        assert!(*self.grid == *other.grid, "fields on different grids");
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        Self::from_values(&self.grid, self.components, values)
    }

    pub fn add(&self, other: &SpectralField) -> SpectralField {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &SpectralField) -> SpectralField {
        self.zip(other, |a, b| a - b)
    }

    pub fn scale(&self, s: f64) -> SpectralField {
        self.map(|v| s * v)
    }

    /// `self + s * other`.
    pub fn axpy(&self, s: f64, other: &SpectralField) -> SpectralField {
        self.zip(other, |a, b| a + s * b)
    }

    pub fn add_constant(&self, s: f64) -> SpectralField {
        self.map(|v| v + s)
    }

    /// Pointwise product of a scalar field with every component of `other`.
    pub fn mul(&self, other: &SpectralField) -> SpectralField {
        assert_eq!(self.components, 1, "left factor of mul must be scalar");
        assert!(*self.grid == *other.grid, "fields on different grids");
        let n = self.grid.len();
        let mut values = other.values.clone();
        for c in 0..other.components {
            for (v, s) in values[c * n..(c + 1) * n].iter_mut().zip(&self.values) {
                *v *= s;
            }
        }
        Self::from_values(&self.grid, other.components, values)
    }

    /// Pointwise Euclidean inner product over components.
    pub fn dot(&self, other: &SpectralField) -> SpectralField {
        assert_eq!(self.components, other.components);
        let n = self.grid.len();
        let mut out = vec![0.0; n];
        for c in 0..self.components {
            let a = self.component_values(c);
            let b = other.component_values(c);
            for p in 0..n {
                out[p] += a[p] * b[p];
            }
        }
        Self::from_values(&self.grid, 1, out)
    }

    /// Matrix field times vector field: `(M w)_i = sum_j M_ij w_j`.
    pub fn mat_vec(&self, w: &SpectralField) -> SpectralField {
        let d = w.components;
        assert_eq!(self.components, d * d);
        let n = self.grid.len();
        let mut out = vec![0.0; n * d];
        for i in 0..d {
            for j in 0..d {
                let m = self.component_values(i * d + j);
                let wj = w.component_values(j);
                for p in 0..n {
                    out[i * n + p] += m[p] * wj[p];
                }
            }
        }
        Self::from_values(&self.grid, d, out)
    }

    pub fn transpose(&self) -> SpectralField {
        let d = (self.components as f64).sqrt().round() as usize;
        assert_eq!(d * d, self.components);
        let n = self.grid.len();
        let mut out = vec![0.0; n * d * d];
        for i in 0..d {
            for j in 0..d {
                out[(j * d + i) * n..(j * d + i + 1) * n].copy_from_slice(self.component_values(i * d + j));
            }
        }
        Self::from_values(&self.grid, self.components, out)
    }

    pub fn trace(&self) -> SpectralField {
        let d = (self.components as f64).sqrt().round() as usize;
        assert_eq!(d * d, self.components);
        let n = self.grid.len();
        let mut out = vec![0.0; n];
        for i in 0..d {
            for (o, v) in out.iter_mut().zip(self.component_values(i * d + i)) {
                *o += v;
            }
        }
        Self::from_values(&self.grid, 1, out)
    }

    /// Scalar field times the identity matrix.
    pub fn times_identity(&self, d: usize) -> SpectralField {
        assert_eq!(self.components, 1);
        let n = self.grid.len();
        let mut out = vec![0.0; n * d * d];
        for i in 0..d {
            out[(i * d + i) * n..(i * d + i + 1) * n].copy_from_slice(&self.values);
        }
        Self::from_values(&self.grid, d * d, out)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn mean(&self, c: usize) -> f64 {
        let v = self.component_values(c);
        v.iter().sum::<f64>() / v.len() as f64
    }

    /// Grid quadrature of `sum_c f_c^2`.
    pub fn l2_norm_squared(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>() * self.grid.cell_volume()
    }

    pub fn l2_norm(&self) -> f64 {
        self.l2_norm_squared().sqrt()
    }

    /// Grid quadrature of each component.
    pub fn integral(&self, c: usize) -> f64 {
        self.component_values(c).iter().sum::<f64>() * self.grid.cell_volume()
    }

    /// Max over entries of `|a - b|` relative to `max |b|`.
    pub fn rel_diff(&self, other: &SpectralField) -> f64 {
        let scale = other.max_abs().max(f64::MIN_POSITIVE);
        self.sub(other).max_abs() / scale
    }
}

/// The unknown pair `(v, eta)`.
#[derive(Clone, Debug)]
pub struct State {
    pub v: SpectralField,
    pub eta: SpectralField,
}

impl State {
    pub fn zeros(grid: &Arc<Grid>) -> Self {
        State { v: SpectralField::zeros(grid, grid.dim()), eta: SpectralField::zeros(grid, 1) }
    }

    pub fn new(v: SpectralField, eta: SpectralField) -> Result<Self> {
        v.check_grid(&eta)?;
        if v.components() != v.grid().dim() || eta.components() != 1 {
            return Err(ShallowError::DimensionMismatch(format!(
                "state needs {} velocity components and one surface component",
                v.grid().dim()
            )));
        }
        Ok(State { v, eta })
    }

    pub fn grid(&self) -> &Arc<Grid> {
        self.v.grid()
    }

    pub fn dim(&self) -> usize {
        self.grid().dim()
    }

    pub fn min_depth(&self) -> f64 {
        1.0 + self.eta.min()
    }

    pub fn check_depth(&self) -> Result<()> {
        let m = self.min_depth();
        if m > 0.0 {
            Ok(())
        } else {
            Err(ShallowError::NonPositiveDepth(m))
        }
    }

    pub fn add(&self, other: &State) -> State {
        State { v: self.v.add(&other.v), eta: self.eta.add(&other.eta) }
    }

    pub fn sub(&self, other: &State) -> State {
        State { v: self.v.sub(&other.v), eta: self.eta.sub(&other.eta) }
    }

    pub fn scale(&self, s: f64) -> State {
        State { v: self.v.scale(s), eta: self.eta.scale(s) }
    }

    pub fn axpy(&self, s: f64, other: &State) -> State {
        State { v: self.v.axpy(s, &other.v), eta: self.eta.axpy(s, &other.eta) }
    }

    /// Flattened `[v_1, ..., v_d, eta]` samples.
    pub fn to_vec(&self) -> Vec<f64> {
        let mut out = self.v.values().to_vec();
        out.extend_from_slice(self.eta.values());
        out
    }

    pub fn from_slice(grid: &Arc<Grid>, data: &[f64]) -> State {
        let n = grid.len();
        let d = grid.dim();
        State {
            v: SpectralField::from_values(grid, d, data[..d * n].to_vec()),
            eta: SpectralField::from_values(grid, 1, data[d * n..(d + 1) * n].to_vec()),
        }
    }
}

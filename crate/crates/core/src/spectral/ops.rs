use std::f64::consts::PI;

use num_complex::Complex64;

use super::field::SpectralField;
use crate::error::{Result, ShallowError};

pub const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };
const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Symbol of `d/dx_j` at frequency `xi` (cycles per unit length).
#[inline]
pub fn d_symbol(xi: f64) -> Complex64 {
    Complex64::new(0.0, 2.0 * PI * xi)
}

/// Applies a per-mode linear map from the input coefficient vector to `out_components` outputs.
pub fn spectral_map<K>(f: &SpectralField, out_components: usize, kernel: K) -> SpectralField
where
    K: Fn(usize, &[f64], &[Complex64], &mut [Complex64]),
{
    let grid = f.grid().clone();
    let n = grid.len();
    let c_in = f.components();
    let spec = f.spectrum();
    let mut out = vec![ZERO; n * out_components];
    let mut inp = vec![ZERO; c_in];
    let mut res = vec![ZERO; out_components];
    for k in 0..n {
        for c in 0..c_in {
            inp[c] = spec[c * n + k];
        }
        res.iter_mut().for_each(|r| *r = ZERO);
        kernel(k, grid.xi(k), &inp, &mut res);
        for c in 0..out_components {
            out[c * n + k] = res[c];
        }
    }
    SpectralField::from_spectrum(&grid, out_components, out)
}

/// Multiplies every component's spectrum by `symbol(xi)`; `zero_mode` replaces the symbol at xi = 0.
pub fn apply_multiplier(
    f: &SpectralField,
    symbol: impl Fn(&[f64]) -> Complex64,
    zero_mode: Complex64,
) -> Result<SpectralField> {
    let grid = f.grid().clone();
    let n = grid.len();
    let mut sym = vec![zero_mode; n];
    for (k, s) in sym.iter_mut().enumerate() {
        if grid.xi_norm(k) == 0.0 {
            continue;
        }
        let v = symbol(grid.xi(k));
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(ShallowError::NonFiniteSymbol(grid.xi(k).to_vec()));
        }
        *s = v;
    }
    Ok(spectral_map(f, f.components(), |k, _, a, out| {
        for (o, x) in out.iter_mut().zip(a) {
            *o = sym[k] * x;
        }
    }))
}

/// Multiplies the component vector of each mode by a square matrix symbol (row-major).
pub fn apply_matrix_multiplier(
    f: &SpectralField,
    symbol: impl Fn(&[f64]) -> Vec<Complex64>,
    zero_mode: &[Complex64],
) -> Result<SpectralField> {
    let c = f.components();
    assert_eq!(zero_mode.len(), c * c);
    let grid = f.grid().clone();
    let mut syms = Vec::with_capacity(grid.len());
    for k in 0..grid.len() {
        if grid.xi_norm(k) == 0.0 {
            syms.push(zero_mode.to_vec());
            continue;
        }
        let m = symbol(grid.xi(k));
        assert_eq!(m.len(), c * c, "matrix symbol has wrong size");
        if m.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(ShallowError::NonFiniteSymbol(grid.xi(k).to_vec()));
        }
        syms.push(m);
    }
    Ok(spectral_map(f, c, |k, _, a, out| {
        let m = &syms[k];
        for i in 0..c {
            out[i] = (0..c).map(|j| m[i * c + j] * a[j]).sum();
        }
    }))
}

pub fn partial(f: &SpectralField, axis: usize) -> SpectralField {
    spectral_map(f, f.components(), |_, xi, a, out| {
        let s = d_symbol(xi[axis]);
        for (o, x) in out.iter_mut().zip(a) {
            *o = s * x;
        }
    })
}

/// Gradient; component `i * d + j` holds `d_j f_i`.
pub fn gradient(f: &SpectralField) -> SpectralField {
    let d = f.grid().dim();
    let c = f.components();
    spectral_map(f, c * d, |_, xi, a, out| {
        for i in 0..c {
            for j in 0..d {
                out[i * d + j] = d_symbol(xi[j]) * a[i];
            }
        }
    })
}

/// Divergence over the last index: `(div X)_i = sum_j d_j X_{i*d+j}`.
pub fn divergence(x: &SpectralField) -> SpectralField {
    let d = x.grid().dim();
    let c = x.components();
    assert_eq!(c % d, 0, "divergence needs a multiple of d components");
    let m = c / d;
    spectral_map(x, m, |_, xi, a, out| {
        for i in 0..m {
            out[i] = (0..d).map(|j| d_symbol(xi[j]) * a[i * d + j]).sum();
        }
    })
}

pub fn laplacian(f: &SpectralField) -> SpectralField {
    spectral_map(f, f.components(), |_, xi, a, out| {
        let s = -4.0 * PI * PI * xi.iter().map(|x| x * x).sum::<f64>();
        for (o, x) in out.iter_mut().zip(a) {
            *o = s * x;
        }
    })
}

/// `grad v + grad v^T + 2 (div v) I`.
pub fn stress_s(v: &SpectralField) -> SpectralField {
    symmetric_gradient(v, 2.0)
}

/// Trace-free symmetric gradient `grad v + grad v^T - (2/d)(div v) I`.
pub fn stress_d0(v: &SpectralField) -> SpectralField {
    let d = v.grid().dim() as f64;
    symmetric_gradient(v, -2.0 / d)
}

fn symmetric_gradient(v: &SpectralField, div_coeff: f64) -> SpectralField {
    let d = v.grid().dim();
    assert_eq!(v.components(), d, "stress needs a vector field");
    spectral_map(v, d * d, |_, xi, a, out| {
        let div: Complex64 = (0..d).map(|j| d_symbol(xi[j]) * a[j]).sum();
        for i in 0..d {
            for j in 0..d {
                out[i * d + j] = d_symbol(xi[j]) * a[i] + d_symbol(xi[i]) * a[j];
            }
            out[i * d + i] += div_coeff * div;
        }
    })
}

/// Leray projector `I - xi xi^T / |xi|^2`; the mean is kept.
pub fn leray_project(x: &SpectralField) -> SpectralField {
    let d = x.grid().dim();
    assert_eq!(x.components(), d);
    spectral_map(x, d, |_, xi, a, out| {
        let r2: f64 = xi.iter().map(|t| t * t).sum();
        if r2 == 0.0 {
            out.copy_from_slice(a);
            return;
        }
        let xa: Complex64 = (0..d).map(|j| xi[j] * a[j]).sum();
        for i in 0..d {
            out[i] = a[i] - xi[i] * xa / r2;
        }
    })
}

/// Riesz transform with symbol `i xi_j / |xi|`, zero at xi = 0.
pub fn riesz(axis: usize, f: &SpectralField) -> SpectralField {
    spectral_map(f, f.components(), |_, xi, a, out| {
        let r = xi.iter().map(|t| t * t).sum::<f64>().sqrt();
        if r == 0.0 {
            return;
        }
        let s = I * (xi[axis] / r);
        for (o, x) in out.iter_mut().zip(a) {
            *o = s * x;
        }
    })
}

fn indicator(f: &SpectralField, keep: impl Fn(usize, f64) -> bool) -> SpectralField {
    let grid = f.grid().clone();
    spectral_map(f, f.components(), |k, _, a, out| {
        if keep(k, grid.wavenumber_norm(k)) {
            out.copy_from_slice(a);
        }
    })
}

/// Splits `f` into the parts with spectrum in `|xi| < kappa` and its complement.
pub fn freq_split(f: &SpectralField, kappa: f64) -> (SpectralField, SpectralField) {
    assert!(kappa > 0.0, "cutoff must be positive");
    let low = indicator(f, |_, r| r < kappa);
    let high = f.sub(&low);
    (low, high)
}

/// Sharp Fourier truncation to the ball `|xi| < 2^j`.
pub fn dyadic_smoother(f: &SpectralField, j: u32) -> SpectralField {
    assert!(j >= 1, "smoothing level starts at 1");
    let radius = 2f64.powi(j as i32);
    indicator(f, |_, r| r < radius)
}

/// Zeroes all modes outside the grid's retained band.
pub fn dealias(f: &SpectralField) -> SpectralField {
    let grid = f.grid().clone();
    indicator(f, |k, _| grid.is_retained(k))
}

/// Dealiased pointwise product of a scalar field with any field.
pub fn product(a: &SpectralField, b: &SpectralField) -> SpectralField {
    dealias(&a.mul(b))
}

/// Spectral interpolation onto another grid with the same extents.
///
/// Wavenumbers present on both grids are copied; Nyquist entries of the smaller grid are dropped.
pub fn resample(f: &SpectralField, target: &std::sync::Arc<super::Grid>) -> SpectralField {
    let src = f.grid();
    assert_eq!(src.extent(), target.extent(), "resampling needs equal extents");
    let d = src.dim();
    let (ns, nt) = (src.points(), target.points());
    let comps = f.components();
    let (lens, lent) = (src.len(), target.len());
    let spec = f.spectrum();
    let mut out = vec![ZERO; lent * comps];
    'modes: for t in 0..lent {
        let mut rem = t;
        let mut idx = vec![0usize; d];
        for a in (0..d).rev() {
            idx[a] = rem % nt[a];
            rem /= nt[a];
        }
        let mut s = 0usize;
        for a in 0..d {
            let k = if idx[a] < nt[a] / 2 { idx[a] as i64 } else { idx[a] as i64 - nt[a] as i64 };
            let lim = (ns[a].min(nt[a]) / 2) as i64;
            if k.abs() >= lim {
                continue 'modes;
            }
            let i = if k >= 0 { k as usize } else { (ns[a] as i64 + k) as usize };
            s = s * ns[a] + i;
        }
        for c in 0..comps {
            out[c * lent + t] = spec[c * lens + s];
        }
    }
    SpectralField::from_spectrum(target, comps, out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::grid::Grid;
    use crate::spectral::random::{band_limited, random_field};

    fn cos_field(l: f64, n: usize) -> SpectralField {
        let g = Grid::new(&[l], &[n]).unwrap();
        SpectralField::scalar_from_fn(&g, |x| (2.0 * PI * x[0] / l).cos())
    }

    #[test]
    fn identity_and_zero_symbols() {
        let g = Grid::new(&[3.0, 2.0], &[16, 8]).unwrap();
        let f = random_field(&g, 2, 1);
        let id = apply_multiplier(&f, |_| Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)).unwrap();
        assert!(id.rel_diff(&f) < 1e-13);
        let z = apply_multiplier(&f, |_| ZERO, ZERO).unwrap();
        assert!(z.max_abs() == 0.0);
    }

    #[test]
    fn non_finite_symbol_is_reported() {
        let g = Grid::new(&[1.0], &[16]).unwrap();
        let f = random_field(&g, 1, 2);
        let r = apply_multiplier(&f, |xi| Complex64::new(1.0 / (xi[0] - 2.0), 0.0), ZERO);
        assert!(matches!(r, Err(ShallowError::NonFiniteSymbol(_))));
    }

    #[test]
    fn derivative_of_cosine() {
        let l = 3.0;
        let f = cos_field(l, 32);
        let df = apply_multiplier(&f, |xi| d_symbol(xi[0]), ZERO).unwrap();
        let expect = SpectralField::scalar_from_fn(f.grid(), |x| -(2.0 * PI / l) * (2.0 * PI * x[0] / l).sin());
        assert!(df.sub(&expect).max_abs() < 1e-12);
        let lap = laplacian(&f);
        let lexp = f.scale(-(2.0 * PI / l).powi(2));
        assert!(lap.sub(&lexp).max_abs() < 1e-11);
    }

    #[test]
    fn gradient_of_constant_vanishes() {
        let g = Grid::new(&[2.0, 5.0], &[8, 16]).unwrap();
        let c = SpectralField::constant(&g, 1, 3.5);
        assert!(gradient(&c).max_abs() < 1e-13);
    }

    #[test]
    fn div_grad_is_laplacian() {
        let g = Grid::new(&[2.0, 3.0], &[32, 16]).unwrap();
        let f = band_limited(&g, 1, 5);
        let a = divergence(&gradient(&f));
        let b = laplacian(&f);
        assert!(a.sub(&b).max_abs() <= 1e-12 * b.max_abs().max(1.0));
    }

    #[test]
    fn multipliers_compose() {
        let g = Grid::new(&[2.0, 3.0], &[32, 16]).unwrap();
        let f = band_limited(&g, 1, 6);
        let a = |xi: &[f64]| d_symbol(xi[0]) + Complex64::new(1.0, 0.0);
        let b = |xi: &[f64]| Complex64::new(1.0 + xi[1] * xi[1], 0.0) * d_symbol(xi[1]);
        let one = Complex64::new(1.0, 0.0);
        let ab = apply_multiplier(&apply_multiplier(&f, b, ZERO).unwrap(), a, one).unwrap();
        let direct = apply_multiplier(&f, |xi| a(xi) * b(xi), ZERO).unwrap();
        assert!(ab.sub(&direct).max_abs() <= 1e-12 * direct.max_abs());
    }

    #[test]
    fn stress_identities() {
        let g = Grid::new(&[2.0, 3.0], &[32, 16]).unwrap();
        let v = band_limited(&g, 2, 7);
        let s = stress_s(&v);
        let div = divergence(&v);
        let tr = s.trace();
        assert!(tr.sub(&div.scale(6.0)).max_abs() <= 1e-12 * tr.max_abs());
        assert!(stress_d0(&v).trace().max_abs() <= 1e-12 * tr.max_abs());
        assert!(stress_s(&SpectralField::zeros(&g, 2)).max_abs() == 0.0);

        let g1 = Grid::new(&[2.0], &[32]).unwrap();
        let w = band_limited(&g1, 1, 8);
        let s1 = stress_s(&w);
        let dw = partial(&w, 0).scale(4.0);
        assert!(s1.sub(&dw).max_abs() <= 1e-12 * dw.max_abs());
        assert!(stress_d0(&w).max_abs() <= 1e-14 * dw.max_abs());
    }

    #[test]
    fn leray_and_riesz() {
        let g = Grid::new(&[2.0, 3.0], &[32, 16]).unwrap();
        let x = random_field(&g, 2, 9);
        let p = leray_project(&x);
        assert!(divergence(&p).max_abs() <= 1e-11 * x.max_abs());
        assert!(leray_project(&p).sub(&p).max_abs() <= 1e-12 * x.max_abs());
        let f = band_limited(&g, 1, 10);
        assert!(leray_project(&gradient(&f)).max_abs() <= 1e-12 * gradient(&f).max_abs());

        let l = 2.0;
        let c = cos_field(l, 16);
        let r = riesz(0, &c);
        let s = SpectralField::scalar_from_fn(c.grid(), |x| -(2.0 * PI * x[0] / l).sin());
        assert!(r.sub(&s).max_abs() < 1e-13);
    }

    #[test]
    fn splitting_and_smoothing() {
        let g = Grid::new(&[4.0, 4.0], &[16, 16]).unwrap();
        let f = random_field(&g, 1, 11);
        let (lo, hi) = freq_split(&f, 100.0);
        assert!(lo.sub(&f).max_abs() < 1e-13 && hi.max_abs() < 1e-13);
        let (lo, hi) = freq_split(&f, 0.1);
        let err = lo.sub(&SpectralField::constant(&g, 1, f.mean(0))).max_abs();
        assert!(err < 1e-13, "{err}");
        assert!(hi.add(&lo).sub(&f).max_abs() <= 1e-15 * f.max_abs());
        let (lo, hi) = freq_split(&f, 1.1);
        let total = f.l2_norm_squared();
        assert!((lo.l2_norm_squared() + hi.l2_norm_squared() - total).abs() <= 1e-12 * total);

        assert!(dyadic_smoother(&f, 5).rel_diff(&f) < 1e-13);
        let s1 = dyadic_smoother(&dyadic_smoother(&f, 2), 1);
        let s2 = dyadic_smoother(&f, 1);
        assert!(s1.sub(&s2).max_abs() < 1e-13);
    }

    #[test]
    fn dealias_removes_high_band() {
        let g = Grid::new(&[1.0, 1.0], &[24, 24]).unwrap();
        let f = band_limited(&g, 1, 12);
        assert!(dealias(&f).rel_diff(&f) < 1e-13);
        let noise = random_field(&g, 1, 13);
        let kept = dealias(&noise);
        let removed = noise.sub(&kept);
        let e = noise.l2_norm_squared();
        assert!((e - kept.l2_norm_squared() - removed.l2_norm_squared()).abs() <= 1e-12 * e);
        assert!(dealias(&removed).max_abs() < 1e-13);
    }

    #[test]
    fn dealiased_product_matches_fine_grid() {
        let ext = [2.0, 3.0];
        let g = Grid::new(&ext, &[32, 32]).unwrap();
        let fine = Grid::new(&ext, &[64, 64]).unwrap();
        let a = band_limited(&g, 1, 14);
        let b = band_limited(&g, 2, 15);
        let coarse = product(&a, &b);
        let exact = resample(&a, &fine).mul(&resample(&b, &fine));
        let back = dealias(&resample(&exact, &g));
        assert!(back.sub(&coarse).max_abs() <= 1e-12 * coarse.max_abs());
        assert!(resample(&resample(&a, &fine), &g).rel_diff(&a) < 1e-13);
    }
}

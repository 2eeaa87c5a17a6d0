//! Seeded random fields for tests and benchmarks.

use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::field::SpectralField;
use super::grid::Grid;

/// Independent uniform samples in `[-1, 1]`.
pub fn random_field(grid: &Arc<Grid>, components: usize, seed: u64) -> SpectralField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = (0..grid.len() * components).map(|_| rng.gen_range(-1.0..1.0)).collect();
    SpectralField::from_values(grid, components, values)
}

/// Random real field whose spectrum sits strictly inside the dealiased band (no Nyquist content),
/// normalized to unit max amplitude.
pub fn band_limited(grid: &Arc<Grid>, components: usize, seed: u64) -> SpectralField {
    band_limited_to(grid, components, seed, |k| grid.is_retained(k) && !grid.is_nyquist(k))
}

/// Random real field with a smooth spectrum `exp(-|xi|^2 / (2 width^2))` inside the retained band.
pub fn smooth_random(grid: &Arc<Grid>, components: usize, seed: u64, width: f64) -> SpectralField {
    let noise = random_field(grid, components, seed);
    let n = grid.len();
    let mut spec = noise.spectrum().to_vec();
    for c in 0..components {
        for k in 0..n {
            let r = grid.xi_norm(k);
            let keep = grid.is_retained(k) && !grid.is_nyquist(k);
            spec[c * n + k] *= if keep { (-0.5 * r * r / (width * width)).exp() } else { 0.0 };
        }
    }
    normalize(SpectralField::from_spectrum(grid, components, spec))
}

fn band_limited_to(
    grid: &Arc<Grid>,
    components: usize,
    seed: u64,
    keep: impl Fn(usize) -> bool,
) -> SpectralField {
    let noise = random_field(grid, components, seed);
    let n = grid.len();
    let mut spec = noise.spectrum().to_vec();
    for c in 0..components {
        for k in 0..n {
            if !keep(k) {
                spec[c * n + k] = Complex64::new(0.0, 0.0);
            }
        }
    }
    normalize(SpectralField::from_spectrum(grid, components, spec))
}

fn normalize(f: SpectralField) -> SpectralField {
    let m = f.max_abs();
    if m > 0.0 {
        f.scale(1.0 / m)
    } else {
        f
    }
}

/// Zero-mean variant of [`band_limited`] (removes each component's mean).
pub fn band_limited_zero_mean(grid: &Arc<Grid>, components: usize, seed: u64) -> SpectralField {
    let f = band_limited(grid, components, seed);
    let n = grid.len();
    let mut v = f.values().to_vec();
    for c in 0..components {
        let m = f.mean(c);
        v[c * n..(c + 1) * n].iter_mut().for_each(|x| *x -= m);
    }
    SpectralField::from_values(grid, components, v)
}

/// A uniform draw in `[lo, hi)` from a seeded generator, for scalar test parameters.
pub fn uniform(seed: u64, lo: f64, hi: f64) -> f64 {
    ChaCha8Rng::seed_from_u64(seed).gen_range(lo..hi)
}

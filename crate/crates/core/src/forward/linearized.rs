use super::forcing::{forcing_poly_derivative, ForcingData};
use super::residual::{convect, outer, pressure_op, shifted, Residual};
use crate::error::Result;
use crate::params::Params;
use crate::spectral::ops::{dealias, divergence, gradient, product, stress_s};
use crate::spectral::{SpectralField, State};

/// Principal part `P` of the derivative at `state0` applied to `dir`.
pub fn apply_principal(state0: &State, params: &Params, dir: &State) -> Result<Residual> {
    state0.check_depth()?;
    let (v, eta) = (&dir.v, &dir.eta);
    let depth0 = state0.eta.add_constant(1.0);
    let w0 = shifted(&state0.v, params.gamma);
    let m0 = product(&depth0, &w0);
    let h = divergence(&product(eta, &w0).add(&product(&depth0, v)));
    let f = dealias(&convect(&m0, v))
        .add(v)
        .sub(&divergence(&product(&depth0, &stress_s(v))).scale(params.mu * params.mu))
        .add(&product(&depth0, &pressure_op(eta, params.sigma)));
    Ok(Residual { h, f })
}

/// Remainder `R` of the derivative at `state0` applied to `dir` (momentum component only).
pub fn apply_remainder(state0: &State, params: &Params, dir: &State) -> Result<SpectralField> {
    state0.check_depth()?;
    let (v, eta) = (&dir.v, &dir.eta);
    let depth0 = state0.eta.add_constant(1.0);
    let w0 = shifted(&state0.v, params.gamma);
    let dm = product(eta, &w0).add(&product(&depth0, v));
    Ok(dealias(&convect(&dm, &state0.v))
        .sub(&divergence(&product(eta, &stress_s(&state0.v))).scale(params.mu * params.mu))
        .add(&product(eta, &pressure_op(&state0.eta, params.sigma))))
}

/// Full derivative of `residual(., forcing_poly(.))` at `state0` in direction `dir`.
pub fn apply_linearized(state0: &State, params: &Params, data: &ForcingData, dir: &State) -> Result<Residual> {
    let p = apply_principal(state0, params, dir)?;
    let r = apply_remainder(state0, params, dir)?;
    let df = forcing_poly_derivative(&state0.eta, data, params, &dir.eta)?;
    Ok(Residual { h: p.h, f: p.f.add(&r).add(&df) })
}

/// `Q[v, eta]`, the principal part after rescaling the velocity direction by `1 + eta0`.
pub fn apply_q(state0: &State, params: &Params, v: &SpectralField, eta: &SpectralField) -> Result<Residual> {
    state0.check_depth()?;
    let depth0 = state0.eta.add_constant(1.0);
    let w0 = shifted(&state0.v, params.gamma);
    let h = divergence(v).add(&divergence(&product(eta, &w0)));
    let f = dealias(&convect(&w0, v))
        .add(v)
        .sub(&divergence(&stress_s(v)).scale(params.mu * params.mu))
        .add(&product(&depth0, &pressure_op(eta, params.sigma)));
    Ok(Residual { h, f })
}

/// `S[v]`, the lower-order momentum terms produced by the rescaling.
pub fn apply_s(state0: &State, params: &Params, v: &SpectralField) -> Result<SpectralField> {
    state0.check_depth()?;
    let d = v.components();
    let inv = state0.eta.map(|e| 1.0 / (1.0 + e));
    let w0 = shifted(&state0.v, params.gamma);
    let ge0 = gradient(&state0.eta);
    let transport = inv.mul(&w0.dot(&ge0));
    let t1 = product(&transport, v).scale(-1.0);
    let t2 = product(&inv.add_constant(-1.0), v);
    let sym = outer(v, &ge0).add(&outer(&ge0, v)).add(&v.dot(&ge0).scale(2.0).times_identity(d));
    let t3 = divergence(&product(&inv, &sym)).scale(params.mu * params.mu);
    Ok(t1.add(&t2).add(&t3))
}

/// Returns `(Q[v, eta], S[v])`; together they reproduce `P[v / (1 + eta0), eta]`.
pub fn apply_q_s_split(
    state0: &State,
    params: &Params,
    v: &SpectralField,
    eta: &SpectralField,
) -> Result<(Residual, SpectralField)> {
    Ok((apply_q(state0, params, v, eta)?, apply_s(state0, params, v)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forward::forcing::forcing_poly;
    use crate::forward::residual::{apply_trivial_linearization, residual};
    use crate::spectral::random::{band_limited, band_limited_zero_mean};
    use crate::spectral::Grid;
    use std::sync::Arc;

    fn bumps(grid: &Arc<Grid>, comps: usize, seed: u64, amp: f64) -> SpectralField {
        let l = grid.extent().to_vec();
        let d = grid.dim();
        SpectralField::from_fn(grid, comps, |x, out| {
            for (c, o) in out.iter_mut().enumerate() {
                let mut s = 0.0;
                for b in 0..3u64 {
                    let t = (seed * 7 + c as u64 * 3 + b) as f64;
                    let r2: f64 = (0..d)
                        .map(|j| {
                            let cj = l[j] * (0.4 + 0.2 * ((t * 0.618 + j as f64 * 0.377).fract()));
                            (x[j] - cj).powi(2)
                        })
                        .sum();
                    s += ((t * 1.3).sin()) * (-r2 / (2.0 * (1.0 + 0.3 * b as f64).powi(2))).exp();
                }
                *o = amp * s;
            }
        })
    }

    fn smooth_state(grid: &Arc<Grid>, seed: u64, amp: f64) -> State {
        let eta = bumps(grid, 1, seed + 1, amp);
        let eta = eta.add_constant(-eta.mean(0));
        State::new(bumps(grid, grid.dim(), seed, amp), eta).unwrap()
    }

    #[test]
    fn zero_background_is_trivial_linearization() {
        let g = Grid::new(&[6.0, 7.0], &[16, 16]).unwrap();
        let dir = State::new(band_limited(&g, 2, 1), band_limited_zero_mean(&g, 1, 2)).unwrap();
        let p = Params::omnisonic(0.9, 0.2, 0.1).unwrap();
        let a = apply_linearized(&State::zeros(&g), &p, &ForcingData::zeros(&g, 0), &dir).unwrap();
        let b = apply_trivial_linearization(&dir, &p);
        assert!(a.sub(&b).max_abs() <= 1e-12 * b.max_abs());
    }

    #[test]
    fn q_s_split_reproduces_principal() {
        let g = Grid::new(&[30.0, 30.0], &[256, 256]).unwrap();
        let p = Params::omnisonic(0.992, 0.2, 0.1).unwrap();
        for seed in 0..3 {
            let s0 = smooth_state(&g, 10 * seed, 0.05);
            let dir = smooth_state(&g, 10 * seed + 5, 1.0);
            let (q, s) = apply_q_s_split(&s0, &p, &dir.v, &dir.eta).unwrap();
            let u = s0.eta.map(|e| 1.0 / (1.0 + e)).mul(&dir.v);
            let lhs = apply_principal(&s0, &p, &State::new(u, dir.eta.clone()).unwrap()).unwrap();
            let rhs = Residual { h: q.h, f: q.f.add(&s) };
            let err = lhs.sub(&rhs).max_abs() / lhs.max_abs();
            assert!(err <= 1e-10, "seed {seed}: {err}");
        }
    }

    #[test]
    fn s_vanishes_on_flat_background() {
        let g = Grid::new(&[10.0, 10.0], &[32, 32]).unwrap();
        let p = Params::omnisonic(0.9, 0.2, 0.1).unwrap();
        let mut s0 = smooth_state(&g, 3, 0.05);
        s0.eta = SpectralField::zeros(&g, 1);
        let v = band_limited(&g, 2, 4);
        assert!(apply_s(&s0, &p, &v).unwrap().max_abs() < 1e-14);
        let s0 = smooth_state(&g, 3, 0.05);
        assert_eq!(apply_s(&s0, &p, &SpectralField::zeros(&g, 2)).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn central_differences_converge_at_second_order() {
        let g = Grid::new(&[10.0, 10.0], &[32, 32]).unwrap();
        let p = Params::omnisonic(1.008, 0.0078, 0.003).unwrap();
        let data = ForcingData::new(
            vec![bumps(&g, 4, 40, 0.1), bumps(&g, 4, 41, 0.1)],
            vec![bumps(&g, 2, 42, 0.1), bumps(&g, 2, 43, 0.1)],
        )
        .unwrap();
        let s0 = smooth_state(&g, 7, 0.05);
        let dir = smooth_state(&g, 8, 1.0);
        let full = |s: &State| {
            let f = forcing_poly(&s.eta, &data, &p).unwrap();
            residual(s, &p, &f).unwrap()
        };
        let jv = apply_linearized(&s0, &p, &data, &dir).unwrap();
        let err = |h: f64| {
            let fd = full(&s0.axpy(h, &dir)).sub(&full(&s0.axpy(-h, &dir))).scale(0.5 / h);
            fd.sub(&jv).y0_norm()
        };
        let (e1, e2) = (err(1e-2), err(5e-3));
        assert!((e1 / e2).log2() >= 1.9, "{e1} {e2}");
    }
}

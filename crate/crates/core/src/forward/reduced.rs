use super::forcing::{forcing_poly_derivative, ForcingData};
use crate::error::{Result, ShallowError};
use crate::params::Params;
use crate::spectral::ops::{dealias, partial, product};
use crate::spectral::SpectralField;

fn check_1d(eta: &SpectralField) -> Result<()> {
    if eta.grid().dim() != 1 {
        return Err(ShallowError::DimensionMismatch("the reduced equation needs a 1D grid".into()));
    }
    let m = 1.0 + eta.min();
    if m <= 0.0 {
        return Err(ShallowError::NonPositiveDepth(m));
    }
    Ok(())
}

/// Velocity solving the 1D mass equation with vanishing far-field flux: `gamma eta / (1 + eta)`.
pub fn v_from_eta(eta: &SpectralField, gamma: f64) -> SpectralField {
    v_from_eta_flux(eta, gamma, 0.0)
}

/// Velocity with mass flux `(1 + eta)(v - gamma) = c - gamma`: `(gamma eta + c) / (1 + eta)`.
pub fn v_from_eta_flux(eta: &SpectralField, gamma: f64, c: f64) -> SpectralField {
    eta.map(|e| (gamma * e + c) / (1.0 + e))
}

/// Reduced free-surface residual with a given forcing field.
pub fn residual_1d(eta: &SpectralField, params: &Params, forcing: &SpectralField) -> Result<SpectralField> {
    residual_1d_flux(eta, 0.0, params, forcing)
}

fn surface_term(eta: &SpectralField, sigma: f64) -> SpectralField {
    partial(&eta.sub(&partial(&partial(eta, 0), 0).scale(sigma * sigma)), 0)
}

/// Reduced residual with flux constant `c`; it equals the full momentum residual at `(v_from_eta_flux, eta)`.
pub fn residual_1d_flux(eta: &SpectralField, c: f64, params: &Params, forcing: &SpectralField) -> Result<SpectralField> {
    check_1d(eta)?;
    eta.check_grid(forcing)?;
    let (g, mu) = (params.gamma, params.mu);
    let v = v_from_eta_flux(eta, g, c);
    let dv = dealias(&partial(&v, 0));
    let depth = eta.add_constant(1.0);
    let visc = partial(&product(&depth, &partial(&v, 0)), 0).scale(4.0 * mu * mu);
    let surf = product(&depth, &surface_term(eta, params.sigma));
    Ok(dv.scale(c - g).add(&v).sub(&visc).add(&surf).add(forcing))
}

/// Derivative of [`residual_1d_flux`] with `forcing_poly(eta)` in direction `(deta, dc)`.
pub fn residual_1d_flux_derivative(
    eta: &SpectralField,
    c: f64,
    params: &Params,
    data: &ForcingData,
    deta: &SpectralField,
    dc: f64,
) -> Result<SpectralField> {
    check_1d(eta)?;
    let (g, mu) = (params.gamma, params.mu);
    let depth = eta.add_constant(1.0);
    let v = v_from_eta_flux(eta, g, c);
    let n = eta.grid().len();
    let dv_vals: Vec<f64> = (0..n)
        .map(|p| ((g - v.values()[p]) * deta.values()[p] + dc) / depth.values()[p])
        .collect();
    let delta_v = SpectralField::from_values(eta.grid(), 1, dv_vals);
    let vx = partial(&v, 0);
    let dvx = partial(&delta_v, 0);
    let adv = dealias(&vx).scale(dc).add(&dealias(&dvx).scale(c - g));
    let visc = partial(&product(deta, &vx).add(&product(&depth, &dvx)), 0).scale(4.0 * mu * mu);
    let surf = product(deta, &surface_term(eta, params.sigma)).add(&product(&depth, &surface_term(deta, params.sigma)));
    let df = forcing_poly_derivative(eta, data, params, deta)?;
    Ok(adv.add(&delta_v).sub(&visc).add(&surf).add(&df))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forward::forcing::forcing_poly;
    use crate::forward::residual::residual;
    use crate::spectral::random::smooth_random;
    use crate::spectral::{Grid, State};

    fn surface(n: usize) -> SpectralField {
        let g = Grid::new(&[20.0], &[n]).unwrap();
        let e = SpectralField::scalar_from_fn(&g, |x| 0.1 * (-(x[0] - 10.0).powi(2) / 2.0).exp() - 0.05 * (-(x[0] - 7.0).powi(2)).exp());
        e.add_constant(-e.mean(0))
    }

    #[test]
    fn trivial_values() {
        let g = Grid::new(&[5.0], &[32]).unwrap();
        let z = SpectralField::zeros(&g, 1);
        let p = Params::omnisonic(0.5, 0.1, 0.1).unwrap();
        assert_eq!(residual_1d(&z, &p, &z).unwrap().max_abs(), 0.0);
        assert_eq!(v_from_eta(&z, 0.5).max_abs(), 0.0);
        let g2 = Grid::new(&[5.0, 5.0], &[8, 8]).unwrap();
        let z2 = SpectralField::zeros(&g2, 1);
        assert!(matches!(residual_1d(&z2, &p, &z2), Err(ShallowError::DimensionMismatch(_))));
    }

    #[test]
    fn substitution_solves_mass_and_matches_momentum() {
        let eta = surface(128);
        let g = eta.grid().clone();
        let p = Params::omnisonic(0.6, 0.1, 0.05).unwrap();
        let forcing = smooth_random(&g, 1, 4, 1.0).scale(0.01);
        for c in [0.0, 0.013] {
            let v = v_from_eta_flux(&eta, p.gamma, c);
            let full = residual(&State::new(v, eta.clone()).unwrap(), &p, &forcing).unwrap();
            assert!(full.h.max_abs() <= 1e-11);
            let red = residual_1d_flux(&eta, c, &p, &forcing).unwrap();
            assert!(red.sub(&full.f).max_abs() <= 1e-13);
        }
    }

    #[test]
    fn reduced_form_matches_displayed_equation() {
        let eta = surface(256);
        let p = Params::omnisonic(0.6, 0.1, 0.05).unwrap();
        let z = SpectralField::zeros(eta.grid(), 1);
        let r = residual_1d(&eta, &p, &z).unwrap();
        let (g, mu, s) = (p.gamma, p.mu, p.sigma);
        let d = |f: &SpectralField| partial(f, 0);
        let u = eta.map(|e| e / (1.0 + e));
        let depth = eta.add_constant(1.0);
        let expect = d(&u)
            .scale(-g * g)
            .add(&u.scale(g))
            .sub(&d(&depth.mul(&d(&u))).scale(4.0 * g * mu * mu))
            .add(&depth.mul(&d(&eta.sub(&d(&d(&eta)).scale(s * s)))));
        assert!(r.sub(&expect).max_abs() <= 1e-10 * expect.max_abs());
    }

    #[test]
    fn derivative_matches_finite_differences() {
        let eta = surface(128);
        let g = eta.grid().clone();
        let p = Params::omnisonic(1.4, 0.1, 0.05).unwrap();
        let data = ForcingData::new(vec![smooth_random(&g, 1, 5, 1.0).scale(0.1), SpectralField::zeros(&g, 1)], vec![
            smooth_random(&g, 1, 6, 1.0).scale(0.1),
            smooth_random(&g, 1, 7, 1.0).scale(0.1),
        ])
        .unwrap();
        let f = |e: &SpectralField, c: f64| residual_1d_flux(e, c, &p, &forcing_poly(e, &data, &p).unwrap()).unwrap();
        let dir = smooth_random(&g, 1, 8, 1.0);
        let (c0, dc) = (0.02, 0.7);
        let jv = residual_1d_flux_derivative(&eta, c0, &p, &data, &dir, dc).unwrap();
        let h = 1e-5;
        let fd = f(&eta.axpy(h, &dir), c0 + h * dc).sub(&f(&eta.axpy(-h, &dir), c0 - h * dc)).scale(0.5 / h);
        assert!(fd.sub(&jv).max_abs() <= 1e-7 * jv.max_abs());
    }
}

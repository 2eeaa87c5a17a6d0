use serde::Serialize;

use super::config::NewtonConfig;
use super::krylov::{gmres, KrylovOutcome};
use super::trivial::TrivialInverse;
use crate::error::{Result, ShallowError};
use crate::forward::{apply_linearized, forcing_poly, residual, ForcingData, Residual};
use crate::params::Params;
use crate::spectral::norms::{param_norms, ParamNorms};
use crate::spectral::ops::{dealias, divergence, spectral_map, stress_d0};
use crate::spectral::{Grid, SpectralField, State};
use std::sync::Arc;

/// Sobolev index of the parameter-dependent norms in reports.
pub const REPORT_INDEX: f64 = 1.0;

#[derive(Clone, Debug, Serialize)]
pub struct SolveReport {
    pub converged: bool,
    pub iterations: usize,
    pub residual_history: Vec<f64>,
    pub krylov_iterations: Vec<usize>,
    #[serde(skip)]
    pub final_state: State,
    /// Full-system `Y_0` residual of the final state.
    pub final_residual: f64,
    /// Power-dissipation integral divided by `max(|v|^2, abs_tol)`.
    pub dissipation_residual: f64,
    /// Relative mean of the final mass residual.
    pub mass_mean: f64,
    pub norm_report: ParamNorms,
    pub params: Params,
    pub warnings: Vec<String>,
    pub failure: Option<String>,
}

/// `int |v|^2 + mu^2 (1+eta)(|D0 v|^2 / 2 + 2(1+1/d)|div v|^2) + F . v`.
pub fn dissipation_integral(state: &State, params: &Params, forcing: &SpectralField) -> f64 {
    let d = state.dim() as f64;
    let v = &state.v;
    let d0 = stress_d0(v);
    let div = divergence(v);
    let depth = state.eta.add_constant(1.0);
    let visc = d0.dot(&d0).scale(0.5).add(&div.mul(&div).scale(2.0 * (1.0 + 1.0 / d)));
    let density = v.dot(v).add(&depth.mul(&visc).scale(params.mu * params.mu)).add(&forcing.dot(v));
    density.integral(0)
}

/// Dissipation integral relative to `max(|v|_{L^2}^2, floor)`.
pub fn dissipation_residual(state: &State, params: &Params, forcing: &SpectralField, floor: f64) -> f64 {
    dissipation_integral(state, params, forcing).abs() / state.v.l2_norm_squared().max(floor)
}

pub(crate) use crate::diagnostics::relative_mean;

/// A nonlinear system in flattened unknowns whose merit is the Euclidean norm of the residual vector times `scale`.
pub(crate) trait NewtonSystem {
    fn residual(&self, x: &[f64]) -> Result<Vec<f64>>;
    fn scale(&self) -> f64;
    /// Approximately solves `J(x) dx = -r`.
    fn step(&self, x: &[f64], r: &[f64], tol: f64, config: &NewtonConfig) -> Result<KrylovOutcome>;
}

pub(crate) struct NewtonTrace {
    pub x: Vec<f64>,
    pub history: Vec<f64>,
    pub krylov: Vec<usize>,
    pub converged: bool,
    pub error: Option<ShallowError>,
}

fn euclid(r: &[f64]) -> f64 {
    r.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub(crate) fn newton_core<S: NewtonSystem>(sys: &S, x0: Vec<f64>, config: &NewtonConfig) -> Result<NewtonTrace> {
    config.validate()?;
    let mut x = x0;
    let mut r = sys.residual(&x)?;
    let mut merit = euclid(&r) * sys.scale();
    let target = config.abs_tol.max(config.rel_tol * merit);
    let mut trace = NewtonTrace { x: Vec::new(), history: vec![merit], krylov: Vec::new(), converged: false, error: None };
    let mut iters = 0;
    while merit > target {
        if iters == config.max_iters {
            trace.error = Some(ShallowError::MaxItersExceeded(iters));
            break;
        }
        iters += 1;
        let out = sys.step(&x, &r, config.krylov_tol_at(merit), config)?;
        trace.krylov.push(out.iterations);
        if !out.converged {
            log::debug!("krylov stopped at relative residual {:.3e}", out.relative_residual);
        }
        let mut t = 1.0;
        let mut accepted = None;
        let mut last_depth_failure = false;
        for _ in 0..=config.max_halvings {
            let trial: Vec<f64> = x.iter().zip(&out.solution).map(|(a, b)| a + t * b).collect();
            match sys.residual(&trial) {
                Ok(rt) => {
                    last_depth_failure = false;
                    let m = euclid(&rt) * sys.scale();
                    if m < merit {
                        accepted = Some((trial, rt, m));
                        break;
                    }
                }
                Err(ShallowError::NonPositiveDepth(_)) => last_depth_failure = true,
                Err(e) => return Err(e),
            }
            t *= config.damping;
        }
        match accepted {
            Some((xn, rn, m)) => {
                log::debug!("newton {iters}: residual {m:.3e} (step {t:.3e}, {} krylov)", out.iterations);
                x = xn;
                r = rn;
                merit = m;
                trace.history.push(merit);
            }
            None => {
                trace.error =
                    Some(if last_depth_failure { ShallowError::DepthCollapse } else { ShallowError::LineSearchFailed });
                break;
            }
        }
    }
    trace.converged = merit <= target;
    trace.x = x;
    Ok(trace)
}

/// Square-root `Y_0` weight applied to the mass component.
pub(crate) fn y0_weights(grid: &Grid) -> Vec<f64> {
    (0..grid.len())
        .map(|k| {
            let r = grid.xi_norm(k);
            if r == 0.0 {
                1.0
            } else {
                (1.0 / (r * r) + 1.0 + r * r).sqrt()
            }
        })
        .collect()
}

fn weight_field(h: &SpectralField, w: &[f64], invert: bool) -> SpectralField {
    spectral_map(h, 1, |k, _, a, o| o[0] = if invert { a[0] / w[k] } else { a[0] * w[k] })
}

struct FullSystem<'a> {
    grid: Arc<Grid>,
    params: &'a Params,
    data: &'a ForcingData,
    pre: TrivialInverse,
    weights: Vec<f64>,
}

impl FullSystem<'_> {
    fn state(&self, x: &[f64]) -> State {
        State::from_slice(&self.grid, x)
    }

    fn to_weighted(&self, r: &Residual) -> Vec<f64> {
        let mut out = weight_field(&r.h, &self.weights, false).into_values();
        out.extend_from_slice(r.f.values());
        out
    }

    fn from_weighted(&self, y: &[f64]) -> Residual {
        let n = self.grid.len();
        let h = SpectralField::from_values(&self.grid, 1, y[..n].to_vec());
        Residual { h: weight_field(&h, &self.weights, true), f: SpectralField::from_values(&self.grid, self.grid.dim(), y[n..].to_vec()) }
    }

    fn full_residual(&self, s: &State) -> Result<Residual> {
        let forcing = forcing_poly(&s.eta, self.data, self.params)?;
        residual(s, self.params, &forcing)
    }

    fn krylov(&self, s0: &State, rhs: &Residual, tol: f64, config: &NewtonConfig) -> Result<(State, KrylovOutcome)> {
        let b = self.to_weighted(rhs);
        let out = gmres(
            |y| {
                let r = self.from_weighted(y);
                let dir = self.pre.apply_unchecked(&r.h, &r.f);
                Ok(self.to_weighted(&apply_linearized(s0, self.params, self.data, &dir)?))
            },
            &b,
            tol,
            config.krylov_restart,
            config.krylov_max_iters,
        )?;
        let r = self.from_weighted(&out.solution);
        Ok((self.pre.apply_unchecked(&r.h, &r.f), out))
    }
}

impl NewtonSystem for FullSystem<'_> {
    fn residual(&self, x: &[f64]) -> Result<Vec<f64>> {
        Ok(self.to_weighted(&self.full_residual(&self.state(x))?))
    }

    fn scale(&self) -> f64 {
        self.grid.cell_volume().sqrt()
    }

    fn step(&self, x: &[f64], r: &[f64], tol: f64, config: &NewtonConfig) -> Result<KrylovOutcome> {
        let s0 = self.state(x);
        let rhs = self.from_weighted(r).scale(-1.0);
        let (dir, mut out) = self.krylov(&s0, &rhs, tol, config)?;
        out.solution = dir.to_vec();
        Ok(out)
    }
}

fn build<'a>(grid: &Arc<Grid>, params: &'a Params, data: &'a ForcingData) -> Result<FullSystem<'a>> {
    params.validate()?;
    Ok(FullSystem { grid: grid.clone(), params, data, pre: TrivialInverse::dealiased(grid, params)?, weights: y0_weights(grid) })
}

/// Solves the linearization at `state0` for `rhs` by right-preconditioned GMRES in the `Y_0` geometry.
pub fn solve_linearized_with_info(
    state0: &State,
    params: &Params,
    data: &ForcingData,
    rhs: &Residual,
    config: &NewtonConfig,
) -> Result<(State, KrylovOutcome)> {
    state0.check_depth()?;
    state0.v.check_grid(&rhs.h)?;
    let m = relative_mean(&rhs.h);
    if m > 1e-12 {
        return Err(ShallowError::NonZeroMeanData(m));
    }
    let sys = build(state0.grid(), params, data)?;
    sys.krylov(state0, rhs, config.krylov_rel_tol, config)
}

pub fn solve_linearized(
    state0: &State,
    params: &Params,
    data: &ForcingData,
    rhs: &Residual,
    config: &NewtonConfig,
) -> Result<State> {
    let (dir, out) = solve_linearized_with_info(state0, params, data, rhs, config)?;
    if !out.converged {
        return Err(ShallowError::KrylovStagnation(out.relative_residual));
    }
    Ok(dir)
}

pub(crate) fn finish_report(
    state: State,
    params: &Params,
    data: &ForcingData,
    config: &NewtonConfig,
    trace: &NewtonTrace,
) -> Result<SolveReport> {
    let forcing = forcing_poly(&state.eta, data, params)?;
    let res = residual(&state, params, &forcing)?;
    let mut warnings = Vec::new();
    if params.is_sonic_inviscid() {
        warnings.push("sonic inviscid parameters: the computed state is expected to depend on resolution".to_string());
    }
    Ok(SolveReport {
        converged: trace.converged,
        iterations: trace.history.len() - 1,
        residual_history: trace.history.clone(),
        krylov_iterations: trace.krylov.clone(),
        final_residual: res.y0_norm(),
        dissipation_residual: dissipation_residual(&state, params, &forcing, config.abs_tol),
        mass_mean: relative_mean(&res.h),
        norm_report: param_norms(&state, params, REPORT_INDEX),
        params: *params,
        warnings,
        failure: trace.error.as_ref().map(|e| e.to_string()),
        final_state: state,
    })
}

fn band_limit_surface(s: &State) -> State {
    let kept = dealias(&s.eta);
    let high = s.eta.sub(&kept).l2_norm();
    if high <= 1e-14 * s.eta.l2_norm() {
        return s.clone();
    }
    State { v: s.v.clone(), eta: kept }
}

/// Damped Newton-Krylov iteration; always returns a report, plus the failure if it did not converge.
///
/// Surface modes above the dealiasing cutoff barely enter the discrete residual, so the initial
/// surface is projected onto the retained band and the iteration never leaves it.
pub fn newton_solve_detailed(
    params: &Params,
    data: &ForcingData,
    initial: &State,
    config: &NewtonConfig,
) -> Result<(SolveReport, Option<ShallowError>)> {
    initial.check_depth()?;
    initial.v.check_grid(&data.tau[0])?;
    let initial = band_limit_surface(initial);
    initial.check_depth()?;
    let sys = build(initial.grid(), params, data)?;
    if params.is_sonic_inviscid() {
        log::warn!("sonic inviscid parameters: expect resolution-dependent results");
    }
    let trace = newton_core(&sys, initial.to_vec(), config)?;
    let state = sys.state(&trace.x);
    let report = finish_report(state, params, data, config, &trace)?;
    Ok((report, trace.error))
}

pub fn newton_solve(params: &Params, data: &ForcingData, initial: &State, config: &NewtonConfig) -> Result<SolveReport> {
    let (report, err) = newton_solve_detailed(params, data, initial, config)?;
    match err {
        Some(e) => Err(e),
        None => Ok(report),
    }
}

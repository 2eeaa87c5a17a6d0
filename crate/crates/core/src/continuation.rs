//! Warm-started parameter sweeps and the parameter-weighted norm table along them.

use serde::{Deserialize, Serialize};

use crate::error::{Result, ShallowError};
use crate::forward::ForcingData;
use crate::params::Params;
use crate::solver::newton::REPORT_INDEX;
use crate::solver::{newton_solve_detailed, NewtonConfig, SolveReport};
use crate::spectral::norms::{aniso_norm_unchecked, derivative_norm, sobolev_norm, x0_norm};
use crate::spectral::State;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Predictor {
    /// Warm start from the previous solution.
    #[default]
    Previous,
    /// Linear extrapolation through the last two solutions.
    Secant,
}

#[derive(Clone, Debug)]
pub struct SweepPlan {
    pub path: Vec<Params>,
    pub forcing: ForcingData,
    /// Forcing amplitudes solved at `path[0]` before the path itself; must end at 1.
    pub amplitude_ramp: Option<Vec<f64>>,
    pub adaptive: bool,
    pub max_halvings: usize,
    pub predictor: Predictor,
}

impl SweepPlan {
    pub fn new(path: Vec<Params>, forcing: ForcingData) -> Self {
        SweepPlan { path, forcing, amplitude_ramp: None, adaptive: true, max_halvings: 6, predictor: Predictor::Previous }
    }

    /// `steps` equal steps from `start` to `end`, both included.
    pub fn segment(start: &Params, end: &Params, steps: usize, forcing: ForcingData) -> Self {
        let path = (0..=steps).map(|i| lerp(start, end, i as f64 / steps.max(1) as f64)).collect();
        Self::new(path, forcing)
    }

    pub fn with_ramp(mut self, ramp: Vec<f64>) -> Self {
        self.amplitude_ramp = Some(ramp);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.path.is_empty() {
            return Err(ShallowError::Config("sweep path is empty".into()));
        }
        for p in &self.path {
            p.validate()?;
            if p.regime != self.path[0].regime {
                return Err(ShallowError::Config("sweep path mixes regimes".into()));
            }
        }
        if let Some(r) = &self.amplitude_ramp {
            if r.last().copied() != Some(1.0) {
                return Err(ShallowError::Config("amplitude ramp must end at 1".into()));
            }
        }
        Ok(())
    }
}

fn lerp(a: &Params, b: &Params, t: f64) -> Params {
    let mix = |x: f64, y: f64| if t == 1.0 { y } else { x + t * (y - x) };
    a.with(mix(a.gamma, b.gamma), mix(a.mu, b.mu), mix(a.sigma, b.sigma))
}

/// `mu |grad v|, mu^2 |grad^2 v|, (mu+sigma) |grad eta|, sigma |grad^2 eta|, sigma^2 |grad^3 eta|` in `L^2`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LimitNorms {
    pub mu_grad_v: f64,
    pub mu2_hess_v: f64,
    pub mu_sigma_grad_eta: f64,
    pub sigma_hess_eta: f64,
    pub sigma2_grad3_eta: f64,
}

impl LimitNorms {
    pub fn of(state: &State, params: &Params) -> Self {
        let (mu, sigma) = (params.mu, params.sigma);
        LimitNorms {
            mu_grad_v: mu * derivative_norm(&state.v, 1, 0.0),
            mu2_hess_v: mu * mu * derivative_norm(&state.v, 2, 0.0),
            mu_sigma_grad_eta: (mu + sigma) * derivative_norm(&state.eta, 1, 0.0),
            sigma_hess_eta: sigma * derivative_norm(&state.eta, 2, 0.0),
            sigma2_grad3_eta: sigma * sigma * derivative_norm(&state.eta, 3, 0.0),
        }
    }

    pub fn columns(&self) -> [f64; 5] {
        [self.mu_grad_v, self.mu2_hess_v, self.mu_sigma_grad_eta, self.sigma_hess_eta, self.sigma2_grad3_eta]
    }

    pub const NAMES: [&'static str; 5] =
        ["mu_grad_v", "mu2_hess_v", "mu_sigma_grad_eta", "sigma_hess_eta", "sigma2_grad3_eta"];
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepPoint {
    pub params: Params,
    pub amplitude: f64,
    pub report: SolveReport,
    /// Substeps inserted by step halving to reach this point.
    pub substeps: usize,
    /// Differences to the previous point: `H^s` of v, anisotropic `s` norm of eta, and `X_0`.
    pub diff_v: f64,
    pub diff_eta: f64,
    pub diff_x0: f64,
    pub limits: LimitNorms,
}

#[derive(Clone, Copy, Debug)]
struct Target {
    params: Params,
    amplitude: f64,
}

fn mid(a: &Target, b: &Target) -> Target {
    Target { params: lerp(&a.params, &b.params, 0.5), amplitude: 0.5 * (a.amplitude + b.amplitude) }
}

fn distance(a: &Target, b: &Target) -> f64 {
    let p = (a.params.gamma - b.params.gamma, a.params.mu - b.params.mu, a.params.sigma - b.params.sigma);
    (p.0 * p.0 + p.1 * p.1 + p.2 * p.2 + (a.amplitude - b.amplitude).powi(2)).sqrt()
}

struct Walker<'a> {
    plan: &'a SweepPlan,
    config: &'a NewtonConfig,
    history: Vec<(Target, State)>,
}

impl Walker<'_> {
    fn guess(&self, to: &Target) -> State {
        let (last_t, last) = self.history.last().unwrap();
        if self.plan.predictor == Predictor::Secant && self.history.len() >= 2 {
            let (prev_t, prev) = &self.history[self.history.len() - 2];
            let d = distance(prev_t, last_t);
            if d > 0.0 {
                let pred = last.axpy(distance(last_t, to) / d, &last.sub(prev));
                if pred.min_depth() > 0.0 {
                    return pred;
                }
            }
        }
        last.clone()
    }

    fn attempt(&self, to: &Target) -> Result<Option<SolveReport>> {
        let data = self.plan.forcing.scale(to.amplitude);
        let (report, err) = newton_solve_detailed(&to.params, &data, &self.guess(to), self.config)?;
        Ok(if err.is_none() && report.converged { Some(report) } else { None })
    }

    /// Reaches `target` from the last accepted point, halving the step on failure.
    fn advance(&mut self, target: Target, index: usize) -> Result<(SolveReport, usize)> {
        let mut pending = vec![target];
        let mut substeps = 0;
        let mut depth = 0;
        let mut last_report = None;
        while let Some(next) = pending.last().copied() {
            match self.attempt(&next)? {
                Some(rep) => {
                    self.history.push((next, rep.final_state.clone()));
                    pending.pop();
                    last_report = Some(rep);
                    depth = 0;
                }
                None => {
                    if !self.plan.adaptive || depth == self.plan.max_halvings {
                        return Err(ShallowError::SweepStalled(index));
                    }
                    let from = self.history.last().unwrap().0;
                    pending.push(mid(&from, &next));
                    substeps += 1;
                    depth += 1;
                }
            }
        }
        Ok((last_report.expect("target was solved"), substeps))
    }
}

/// Solves along the plan with warm starts; returns one entry per ramp amplitude and path point.
pub fn sweep(plan: &SweepPlan, config: &NewtonConfig) -> Result<Vec<SweepPoint>> {
    plan.validate()?;
    let grid = plan.forcing.grid().clone();
    let mut targets: Vec<Target> = Vec::new();
    for &a in plan.amplitude_ramp.iter().flatten() {
        targets.push(Target { params: plan.path[0], amplitude: a });
    }
    if plan.amplitude_ramp.is_some() {
        targets.pop();
    }
    targets.extend(plan.path.iter().map(|&p| Target { params: p, amplitude: 1.0 }));
    let start = Target { params: targets[0].params, amplitude: 0.0 };
    let mut walker = Walker { plan, config, history: vec![(start, State::zeros(&grid))] };
    let mut out: Vec<SweepPoint> = Vec::with_capacity(targets.len());
    for (i, t) in targets.iter().enumerate() {
        let (report, substeps) = walker.advance(*t, i)?;
        let state = &report.final_state;
        let (diff_v, diff_eta, diff_x0) = match out.last() {
            Some(prev) => {
                let d = state.sub(&prev.report.final_state);
                (sobolev_norm(&d.v, REPORT_INDEX), aniso_norm_unchecked(&d.eta, REPORT_INDEX), x0_norm(&d))
            }
            None => (0.0, 0.0, 0.0),
        };
        log::info!(
            "sweep point {i}: gamma={} mu={} sigma={} amp={} iters={} dX0={diff_x0:.3e}",
            t.params.gamma,
            t.params.mu,
            t.params.sigma,
            t.amplitude,
            report.iterations
        );
        out.push(SweepPoint {
            params: t.params,
            amplitude: t.amplitude,
            limits: LimitNorms::of(state, &t.params),
            report,
            substeps,
            diff_v,
            diff_eta,
            diff_x0,
        });
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct LimitReport {
    pub names: [&'static str; 5],
    pub rows: Vec<(Params, [f64; 5])>,
    /// Per-column maxima relative to the first row (`NaN`-free; 0/0 counts as 1).
    pub growth: [f64; 5],
    pub bounded: bool,
    pub max_step_difference: f64,
}

/// Tabulates the parameter-weighted norms and checks they stay within twice their starting values.
pub fn limit_report(points: &[SweepPoint]) -> LimitReport {
    let rows: Vec<(Params, [f64; 5])> = points.iter().map(|p| (p.params, p.limits.columns())).collect();
    let mut growth = [1.0; 5];
    if let Some((_, first)) = rows.first() {
        for c in 0..5 {
            let peak = rows.iter().map(|(_, r)| r[c]).fold(0.0, f64::max);
            growth[c] = if first[c] > 0.0 {
                peak / first[c]
            } else if peak == 0.0 {
                1.0
            } else {
                f64::INFINITY
            };
        }
    }
    LimitReport {
        names: LimitNorms::NAMES,
        bounded: growth.iter().all(|g| *g <= 2.0),
        growth,
        max_step_difference: points.iter().map(|p| p.diff_x0).fold(0.0, f64::max),
        rows,
    }
}

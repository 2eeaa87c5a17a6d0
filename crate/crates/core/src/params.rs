use serde::{Deserialize, Serialize};

use crate::error::{Result, ShallowError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    #[default]
    Omnisonic,
    Subsonic,
}

/// Dimensionless wave speed, viscosity and surface tension.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    pub gamma: f64,
    pub mu: f64,
    pub sigma: f64,
    #[serde(default)]
    pub regime: Regime,
}

impl Params {
    pub fn new(gamma: f64, mu: f64, sigma: f64, regime: Regime) -> Result<Self> {
        let p = Params { gamma, mu, sigma, regime };
        p.validate()?;
        Ok(p)
    }

    pub fn omnisonic(gamma: f64, mu: f64, sigma: f64) -> Result<Self> {
        Self::new(gamma, mu, sigma, Regime::Omnisonic)
    }

    pub fn subsonic(gamma: f64, mu: f64, sigma: f64) -> Result<Self> {
        Self::new(gamma, mu, sigma, Regime::Subsonic)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma.is_finite() && self.gamma > 0.0) {
            return Err(ShallowError::InvalidParams(format!("gamma = {} must be positive", self.gamma)));
        }
        if !(self.mu.is_finite() && self.mu >= 0.0) {
            return Err(ShallowError::InvalidParams(format!("mu = {} must be nonnegative", self.mu)));
        }
        if !(self.sigma.is_finite() && self.sigma >= 0.0) {
            return Err(ShallowError::InvalidParams(format!("sigma = {} must be nonnegative", self.sigma)));
        }
        if self.regime == Regime::Subsonic && self.gamma >= 1.0 {
            return Err(ShallowError::InvalidParams(format!(
                "subsonic regime needs gamma < 1, got {}",
                self.gamma
            )));
        }
        Ok(())
    }

    pub fn with(&self, gamma: f64, mu: f64, sigma: f64) -> Self {
        Params { gamma, mu, sigma, regime: self.regime }
    }

    pub fn is_sonic_inviscid(&self) -> bool {
        self.gamma == 1.0 && self.mu == 0.0 && self.sigma == 0.0
    }
}

/// Dimensional inputs: gravity, depth, drag, viscosity, surface tension, wave speed.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Physical {
    pub g: f64,
    pub depth: f64,
    pub alpha: f64,
    pub mu: f64,
    pub sigma: f64,
    pub gamma: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scales {
    pub length: f64,
    pub time: f64,
}

pub fn nondimensionalize(p: &Physical, regime: Regime) -> Result<(Params, Scales)> {
    if !(p.g > 0.0) {
        return Err(ShallowError::NonPositivePhysical("g"));
    }
    if !(p.depth > 0.0) {
        return Err(ShallowError::NonPositivePhysical("depth"));
    }
    if !(p.alpha > 0.0) {
        return Err(ShallowError::NonPositivePhysical("alpha"));
    }
    if !(p.mu >= 0.0) {
        return Err(ShallowError::NonPositivePhysical("mu"));
    }
    if !(p.sigma >= 0.0) {
        return Err(ShallowError::NonPositivePhysical("sigma"));
    }
    if !(p.gamma > 0.0) {
        return Err(ShallowError::NonPositivePhysical("gamma"));
    }
    let (g, h, a) = (p.g, p.depth, p.alpha);
    let length = (g * h).sqrt() * h / a;
    let time = h / a;
    let mu = (p.mu * a / (g * h * h)).sqrt();
    let sigma = (p.sigma * a * a / (g * g * h * h * h)).sqrt();
    let gamma = p.gamma * time / length;
    Ok((Params::new(gamma, mu, sigma, regime)?, Scales { length, time }))
}

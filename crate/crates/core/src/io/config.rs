use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::dump::read_field;
use crate::continuation::{Predictor, SweepPlan};
use crate::error::{Result, ShallowError};
use crate::forward::forcing::normal_stress_as_poly;
use crate::forward::ForcingData;
use crate::params::Params;
use crate::solver::NewtonConfig;
use crate::spectral::grid::DEFAULT_DEALIAS;
use crate::spectral::ops::{dealias, gradient};
use crate::spectral::{Grid, SpectralField};

fn cfg_err(key: &str, msg: impl std::fmt::Display) -> ShallowError {
    ShallowError::Config(format!("{key}: {msg}"))
}

fn default_dealias() -> f64 {
    DEFAULT_DEALIAS
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    #[serde(default)]
    pub dim: Option<usize>,
    pub extent: Vec<f64>,
    pub points: Vec<usize>,
    #[serde(default = "default_dealias")]
    pub dealias_fraction: f64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ForcingMode {
    #[default]
    None,
    Poly,
    Stress,
    GaussianPreset,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PresetTarget {
    /// Normal-normal sheet stress.
    #[default]
    SheetNn,
    /// `phi_0 = G e_1`.
    Phi0,
}

/// Gaussian profile `amplitude * exp(-|x - center|^2 / (2 width^2))`, one amplitude per component.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Profile {
    pub amplitude: Vec<f64>,
    #[serde(default)]
    pub center: Option<Vec<f64>>,
    pub width: f64,
}

/// Surface and body forces that do not vary with height.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StressSection {
    pub bulk: Option<Profile>,
    pub sheet_vector: Option<Profile>,
    pub sheet_normal: Option<Profile>,
}

fn default_amplitude() -> f64 {
    0.05
}

fn default_width() -> f64 {
    0.5
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForcingSection {
    #[serde(default)]
    pub mode: ForcingMode,
    #[serde(default = "default_amplitude")]
    pub amplitude: f64,
    #[serde(default)]
    pub center: Option<Vec<f64>>,
    #[serde(default = "default_width")]
    pub width: f64,
    #[serde(default)]
    pub target: PresetTarget,
    /// Raw field files for `tau_i` and `phi_i`, relative to the config file.
    #[serde(default)]
    pub tau_files: Vec<String>,
    #[serde(default)]
    pub phi_files: Vec<String>,
    #[serde(default)]
    pub stress: Option<StressSection>,
}

impl Default for ForcingSection {
    fn default() -> Self {
        ForcingSection {
            mode: ForcingMode::None,
            amplitude: default_amplitude(),
            center: None,
            width: default_width(),
            target: PresetTarget::SheetNn,
            tau_files: Vec::new(),
            phi_files: Vec::new(),
            stress: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReducedSection {
    pub case: u8,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamPoint {
    pub gamma: f64,
    pub mu: f64,
    pub sigma: f64,
}

fn default_steps() -> usize {
    8
}

fn default_true() -> bool {
    true
}

fn default_halvings() -> usize {
    6
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub to: ParamPoint,
    #[serde(default = "default_steps")]
    pub steps: usize,
    #[serde(default)]
    pub ramp: Option<Vec<f64>>,
    #[serde(default = "default_true")]
    pub adaptive: bool,
    #[serde(default = "default_halvings")]
    pub max_halvings: usize,
    #[serde(default)]
    pub predictor: Predictor,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    F64,
    Csv,
    Json,
}

fn default_directory() -> String {
    "out".into()
}

fn default_formats() -> Vec<Format> {
    vec![Format::F64, Format::Csv, Format::Json]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default = "default_directory")]
    pub directory: String,
    #[serde(default = "default_formats")]
    pub formats: Vec<Format>,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection { directory: default_directory(), formats: default_formats() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub grid: GridSection,
    pub params: Params,
    #[serde(default)]
    pub forcing: ForcingSection,
    #[serde(default)]
    pub solver: NewtonConfig,
    #[serde(default)]
    pub reduced: Option<ReducedSection>,
    #[serde(default)]
    pub sweep: Option<SweepSection>,
    #[serde(default)]
    pub output: OutputSection,
    /// Directory that relative paths resolve against; not part of the file.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

/// Sets `path = value` (dotted path) in a TOML tree; `value` is parsed as TOML, or taken as a string.
pub fn apply_override(root: &mut toml::Value, assignment: &str) -> Result<()> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| ShallowError::Config(format!("override `{assignment}` is not key=value")))?;
    let key = key.trim();
    let raw = raw.trim();
    let value = match toml::from_str::<toml::Table>(&format!("v = {raw}")) {
        Ok(mut t) => t.remove("v").expect("parsed key"),
        Err(_) => toml::Value::String(raw.to_string()),
    };
    let parts: Vec<&str> = key.split('.').collect();
    let mut node = root;
    for (i, part) in parts.iter().enumerate() {
        let table = node.as_table_mut().ok_or_else(|| cfg_err(key, "path crosses a non-table value"))?;
        if i + 1 == parts.len() {
            table.insert(part.to_string(), value);
            return Ok(());
        }
        node = table.entry(part.to_string()).or_insert_with(|| toml::Value::Table(toml::Table::new()));
    }
    Err(cfg_err(key, "empty key"))
}

impl RunConfig {
    pub fn parse(text: &str, overrides: &[String]) -> Result<Self> {
        let mut root: toml::Value =
            toml::from_str::<toml::Table>(text).map(toml::Value::Table).map_err(|e| ShallowError::Config(e.to_string()))?;
        for o in overrides {
            apply_override(&mut root, o)?;
        }
        let cfg: RunConfig = root.try_into().map_err(|e: toml::de::Error| ShallowError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path, overrides: &[String]) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| ShallowError::Config(format!("{}: {e}", path.display())))?;
        let mut cfg = Self::parse(&text, overrides)?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).unwrap_or_default()
    }

    pub fn validate(&self) -> Result<()> {
        let g = &self.grid;
        if let Some(d) = g.dim {
            if d != g.extent.len() {
                return Err(cfg_err("grid.dim", format!("{d} does not match {} extents", g.extent.len())));
            }
        }
        self.grid().map_err(|e| cfg_err("grid", e))?;
        self.params.validate().map_err(|e| cfg_err("params", e))?;
        self.solver.validate().map_err(|e| cfg_err("solver", e))?;
        let d = g.extent.len();
        let f = &self.forcing;
        if !(f.width > 0.0) {
            return Err(cfg_err("forcing.width", "must be positive"));
        }
        if let Some(c) = &f.center {
            if c.len() != d {
                return Err(cfg_err("forcing.center", format!("needs {d} entries")));
            }
        }
        if f.mode == ForcingMode::Poly && (f.phi_files.is_empty() || f.phi_files.len() != f.tau_files.len()) {
            return Err(cfg_err("forcing.phi_files", "poly mode needs matching nonempty tau_files and phi_files"));
        }
        if f.mode == ForcingMode::Stress && f.stress.is_none() {
            return Err(cfg_err("forcing.stress", "stress mode needs a [forcing.stress] table"));
        }
        if let Some(s) = &f.stress {
            for (name, prof, comps) in
                [("bulk", &s.bulk, d), ("sheet_vector", &s.sheet_vector, d), ("sheet_normal", &s.sheet_normal, 1)]
            {
                if let Some(p) = prof {
                    if p.amplitude.len() != comps {
                        return Err(cfg_err(&format!("forcing.stress.{name}.amplitude"), format!("needs {comps} entries")));
                    }
                    if !(p.width > 0.0) {
                        return Err(cfg_err(&format!("forcing.stress.{name}.width"), "must be positive"));
                    }
                }
            }
        }
        if let Some(r) = &self.reduced {
            if d != 1 {
                return Err(cfg_err("reduced.case", "the reduced solver needs a 1D grid"));
            }
            if !(1..=3).contains(&r.case) {
                return Err(cfg_err("reduced.case", format!("{} is not 1, 2 or 3", r.case)));
            }
        }
        if let Some(s) = &self.sweep {
            self.params.with(s.to.gamma, s.to.mu, s.to.sigma).validate().map_err(|e| cfg_err("sweep.to", e))?;
            if s.steps == 0 {
                return Err(cfg_err("sweep.steps", "must be positive"));
            }
            if let Some(r) = &s.ramp {
                if r.last().copied() != Some(1.0) {
                    return Err(cfg_err("sweep.ramp", "must end at 1"));
                }
            }
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<Arc<Grid>> {
        Grid::with_dealias(&self.grid.extent, &self.grid.points, self.grid.dealias_fraction)
    }

    fn center(&self, c: &Option<Vec<f64>>) -> Vec<f64> {
        c.clone().unwrap_or_else(|| self.grid.extent.iter().map(|l| l / 2.0).collect())
    }

    /// The forcing center used by the preset (box center by default).
    pub fn forcing_center(&self) -> Vec<f64> {
        self.center(&self.forcing.center)
    }

    pub fn forcing_data(&self, grid: &Arc<Grid>) -> Result<ForcingData> {
        let f = &self.forcing;
        let d = grid.dim();
        match f.mode {
            ForcingMode::None => Ok(ForcingData::zeros(grid, 0)),
            ForcingMode::GaussianPreset => {
                let g = gaussian(grid, &self.forcing_center(), f.width).scale(f.amplitude);
                Ok(match f.target {
                    PresetTarget::SheetNn => normal_stress_as_poly(&dealias(&g), &self.params),
                    PresetTarget::Phi0 => {
                        let zero = SpectralField::zeros(grid, 1);
                        let mut comps = vec![dealias(&g)];
                        comps.extend((1..d).map(|_| zero.clone()));
                        let refs: Vec<&SpectralField> = comps.iter().collect();
                        ForcingData::from_phi0(SpectralField::stack(&refs))
                    }
                })
            }
            ForcingMode::Poly => {
                let load = |name: &String, comps: usize| read_field(&self.base_dir.join(name), grid, comps);
                let tau = f.tau_files.iter().map(|n| load(n, d * d)).collect::<Result<Vec<_>>>()?;
                let phi = f.phi_files.iter().map(|n| load(n, d)).collect::<Result<Vec<_>>>()?;
                ForcingData::new(tau, phi)
            }
            ForcingMode::Stress => {
                let s = f.stress.as_ref().expect("validated");
                let profile = |p: &Profile| {
                    let shape = gaussian(grid, &self.center(&p.center), p.width);
                    let comps: Vec<SpectralField> = p.amplitude.iter().map(|a| dealias(&shape.scale(*a))).collect();
                    let refs: Vec<&SpectralField> = comps.iter().collect();
                    SpectralField::stack(&refs)
                };
                let mut data = ForcingData::zeros(grid, 1);
                if let Some(b) = &s.bulk {
                    let fb = profile(b);
                    data.phi[0] = data.phi[0].add(&fb);
                    data.phi[1] = data.phi[1].add(&fb);
                }
                if let Some(v) = &s.sheet_vector {
                    data.phi[0] = data.phi[0].sub(&profile(v));
                }
                if let Some(n) = &s.sheet_normal {
                    let nn = normal_stress_as_poly(&profile(n), &self.params);
                    data.tau[0] = data.tau[0].add(&nn.tau[0]);
                    data.phi[0] = data.phi[0].add(&nn.phi[0]);
                    data.phi[1] = data.phi[1].add(&nn.phi[1]);
                }
                Ok(data)
            }
        }
    }

    pub fn sweep_plan(&self, grid: &Arc<Grid>) -> Result<Option<SweepPlan>> {
        let Some(s) = &self.sweep else { return Ok(None) };
        let end = self.params.with(s.to.gamma, s.to.mu, s.to.sigma);
        let mut plan = SweepPlan::segment(&self.params, &end, s.steps, self.forcing_data(grid)?);
        plan.amplitude_ramp = s.ramp.clone();
        plan.adaptive = s.adaptive;
        plan.max_halvings = s.max_halvings;
        plan.predictor = s.predictor;
        Ok(Some(plan))
    }
}

/// Unit-amplitude Gaussian bump with standard deviation `width`, periodized by nearest image.
pub fn gaussian(grid: &Arc<Grid>, center: &[f64], width: f64) -> SpectralField {
    let ext = grid.extent().to_vec();
    SpectralField::scalar_from_fn(grid, |x| {
        let r2: f64 = x
            .iter()
            .zip(center)
            .zip(&ext)
            .map(|((xi, ci), l)| {
                let d = (xi - ci + 0.5 * l).rem_euclid(*l) - 0.5 * l;
                d * d
            })
            .sum();
        (-r2 / (2.0 * width * width)).exp()
    })
}

/// Momentum forcing field of a gaussian preset evaluated at a surface, for cross-checks against the stress route.
pub fn preset_stress_forcing(grid: &Arc<Grid>, cfg: &RunConfig, eta: &SpectralField) -> Result<SpectralField> {
    let g = dealias(&gaussian(grid, &cfg.forcing_center(), cfg.forcing.width).scale(cfg.forcing.amplitude));
    let ge = gradient(eta);
    Ok(dealias(&g.mul(&ge).add(&eta.add_constant(1.0).mul(&gradient(&g))).scale(-1.0)))
}

use std::fs;
use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Result, ShallowError};
use crate::forward::ForcingData;
use crate::params::Params;
use crate::spectral::{Grid, SpectralField, State};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridInfo {
    pub extent: Vec<f64>,
    pub points: Vec<usize>,
    pub dealias_fraction: f64,
}

impl GridInfo {
    pub fn of(grid: &Grid) -> Self {
        GridInfo { extent: grid.extent().to_vec(), points: grid.points().to_vec(), dealias_fraction: grid.dealias_fraction() }
    }

    pub fn build(&self) -> Result<Arc<Grid>> {
        Grid::with_dealias(&self.extent, &self.points, self.dealias_fraction)
    }
}

/// Description of a dump directory. Fields are raw little-endian `f64`, one file per component, row-major samples.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub version: String,
    pub grid: GridInfo,
    pub params: Params,
    pub velocity: Vec<String>,
    pub eta: String,
    /// Coefficient fields `tau_i` (`d*d` components each) and `phi_i` (`d` components each).
    pub tau: Vec<String>,
    pub phi: Vec<String>,
    /// Momentum forcing evaluated at the stored surface.
    pub forcing: Vec<String>,
    /// Forcing center of the run, when a preset defines one.
    #[serde(default)]
    pub center: Option<Vec<f64>>,
    #[serde(default)]
    pub config: Option<String>,
}

pub fn write_field(path: &Path, values: &[f64]) -> Result<()> {
    let mut bytes = Vec::with_capacity(values.len() * 8);
    for v in values {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    fs::write(path, bytes)?;
    Ok(())
}

pub fn read_values(path: &Path, expected: usize) -> Result<Vec<f64>> {
    let bytes = fs::read(path).map_err(|e| ShallowError::Io(format!("{}: {e}", path.display())))?;
    if bytes.len() != expected * 8 {
        return Err(ShallowError::Io(format!(
            "{}: expected {} values, found {} bytes",
            path.display(),
            expected,
            bytes.len()
        )));
    }
    Ok(bytes.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes"))).collect())
}

/// Reads a `components`-component field stored component-major in one file.
pub fn read_field(path: &Path, grid: &Arc<Grid>, components: usize) -> Result<SpectralField> {
    Ok(SpectralField::from_values(grid, components, read_values(path, grid.len() * components)?))
}

/// A loaded dump.
pub struct Dump {
    pub manifest: Manifest,
    pub grid: Arc<Grid>,
    pub state: State,
    pub data: ForcingData,
    pub forcing: SpectralField,
}

pub struct DumpContents<'a> {
    pub version: &'a str,
    pub params: &'a Params,
    pub state: &'a State,
    pub data: &'a ForcingData,
    pub forcing: &'a SpectralField,
    pub center: Option<Vec<f64>>,
    pub config: Option<String>,
}

pub fn write_dump(dir: &Path, c: &DumpContents<'_>) -> Result<Manifest> {
    fs::create_dir_all(dir)?;
    let d = c.state.dim();
    let mut velocity = Vec::new();
    for j in 0..d {
        let name = format!("v_{j}.f64");
        write_field(&dir.join(&name), c.state.v.component_values(j))?;
        velocity.push(name);
    }
    write_field(&dir.join("eta.f64"), c.state.eta.values())?;
    let mut tau = Vec::new();
    let mut phi = Vec::new();
    for (i, (t, p)) in c.data.tau.iter().zip(&c.data.phi).enumerate() {
        let (tn, pn) = (format!("tau_{i}.f64"), format!("phi_{i}.f64"));
        write_field(&dir.join(&tn), t.values())?;
        write_field(&dir.join(&pn), p.values())?;
        tau.push(tn);
        phi.push(pn);
    }
    let mut forcing = Vec::new();
    for j in 0..d {
        let name = format!("forcing_{j}.f64");
        write_field(&dir.join(&name), c.forcing.component_values(j))?;
        forcing.push(name);
    }
    let manifest = Manifest {
        version: c.version.to_string(),
        grid: GridInfo::of(c.state.grid()),
        params: *c.params,
        velocity,
        eta: "eta.f64".into(),
        tau,
        phi,
        forcing,
        center: c.center.clone(),
        config: c.config.clone(),
    };
    write_json(&dir.join("manifest.json"), &manifest)?;
    Ok(manifest)
}

pub fn read_dump(dir: &Path) -> Result<Dump> {
    let text = fs::read_to_string(dir.join("manifest.json"))
        .map_err(|e| ShallowError::Io(format!("{}: {e}", dir.join("manifest.json").display())))?;
    let manifest: Manifest = serde_json::from_str(&text).map_err(|e| ShallowError::Io(format!("manifest: {e}")))?;
    let grid = manifest.grid.build()?;
    let n = grid.len();
    let load = |names: &[String]| -> Result<SpectralField> {
        let mut vals = Vec::with_capacity(n * names.len());
        for name in names {
            vals.extend(read_values(&dir.join(name), n)?);
        }
        Ok(SpectralField::from_values(&grid, names.len(), vals))
    };
    let v = load(&manifest.velocity)?;
    let eta = load(std::slice::from_ref(&manifest.eta))?;
    let forcing = load(&manifest.forcing)?;
    let d = grid.dim();
    let tau = manifest.tau.iter().map(|t| read_field(&dir.join(t), &grid, d * d)).collect::<Result<Vec<_>>>()?;
    let phi = manifest.phi.iter().map(|p| read_field(&dir.join(p), &grid, d)).collect::<Result<Vec<_>>>()?;
    let data = ForcingData::new(tau, phi)?;
    let state = State::new(v, eta)?;
    Ok(Dump { manifest, grid, state, data, forcing })
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| ShallowError::Io(e.to_string()))?;
    fs::write(path, text + "\n")?;
    Ok(())
}

/// `x,eta` (1D) or `x1,x2,eta` (2D) rows over the grid.
pub fn write_eta_csv(path: &Path, eta: &SpectralField) -> Result<()> {
    let grid = eta.grid();
    let mut out = std::io::BufWriter::new(fs::File::create(path)?);
    match grid.dim() {
        1 => writeln!(out, "x,eta")?,
        _ => writeln!(out, "x1,x2,eta")?,
    }
    for (p, e) in eta.values().iter().enumerate() {
        let x = grid.coords(p);
        let coords: Vec<String> = x.iter().map(|c| format!("{c:.10e}")).collect();
        writeln!(out, "{},{e:.17e}", coords.join(","))?;
    }
    out.flush()?;
    Ok(())
}

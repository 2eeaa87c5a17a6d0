//! Fixtures shared by the benchmarks in `benches/`.

use std::sync::Arc;

use shallow::forward::ForcingData;
use shallow::io::RunConfig;
use shallow::spectral::random::{band_limited, band_limited_zero_mean};
use shallow::{Grid, Params, State};

pub fn square(n: usize) -> Arc<Grid> {
    Grid::new(&[20.0, 20.0], &[n, n]).expect("valid grid")
}

/// Small smooth background state with positive depth.
pub fn background(grid: &Arc<Grid>, seed: u64) -> State {
    let v = band_limited(grid, 2, seed).scale(1e-2);
    let eta = band_limited_zero_mean(grid, 1, seed + 1);
    let eta = eta.scale(1e-2 / eta.max_abs());
    State::new(v, eta).expect("matching grids")
}

pub fn preset(n: usize) -> (Params, ForcingData) {
    let text = format!(
        "[grid]\nextent = [20.0, 20.0]\npoints = [{n}, {n}]\n[params]\ngamma = 0.992\nmu = 0.0078\nsigma = 0.003\n[forcing]\nmode = \"gaussian_preset\"\n"
    );
    let cfg = RunConfig::parse(&text, &[]).expect("valid preset");
    let grid = cfg.grid().expect("valid grid");
    (cfg.params, cfg.forcing_data(&grid).expect("preset forcing"))
}

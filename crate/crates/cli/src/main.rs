use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::{info, warn};
use serde::Serialize;

use shallow::continuation::{limit_report, sweep, LimitReport};
use shallow::diagnostics::{all_passed, check_state, fore_aft_moment, spectral_tail, CheckThresholds};
use shallow::forward::{forcing_poly, ForcingData};
use shallow::io::{read_dump, write_dump, write_eta_csv, write_json, DumpContents, RunConfig};
use shallow::io::config::Format;
use shallow::linear::{adn_classify, dispersion, log_spaced};
use shallow::solver::{newton_solve_detailed, solve_1d_detailed, SolveReport};
use shallow::{Params, Regime, ShallowError, State};

const VERSION: &str = env!("SHALLOW_VERSION");

const EXIT_CONFIG: u8 = 2;
const EXIT_SOLVER: u8 = 3;
const EXIT_CHECK: u8 = 4;

#[derive(Parser)]
#[command(name = "shallow", version = VERSION, about = "Traveling-wave solver for forced shallow water")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// TOML run configuration.
    config: PathBuf,
    /// Override a config key, e.g. `--set params.gamma=1.008`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Output directory (overrides `output.directory`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Warm start from a previous dump directory.
    #[arg(long)]
    init: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Solve for one traveling wave.
    Solve(RunArgs),
    /// Solve with the reduced 1D scheme.
    Reduce1d {
        #[command(flatten)]
        run: RunArgs,
        /// Multiplier case (overrides `reduced.case`).
        #[arg(long)]
        case: Option<u8>,
    },
    /// Continue a solution along the configured parameter path.
    Sweep(RunArgs),
    /// Print the ellipticity classification.
    Classify {
        #[arg(long, allow_hyphen_values = true)]
        gamma: f64,
        #[arg(long, allow_hyphen_values = true)]
        mu: f64,
        #[arg(long, allow_hyphen_values = true)]
        sigma: f64,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value = "omnisonic")]
        regime: String,
        /// Also write the classification record as JSON here.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Print phase and group speeds as CSV.
    Dispersion {
        #[arg(long, allow_hyphen_values = true)]
        sigma: f64,
        #[arg(long, default_value_t = 0.01)]
        min: f64,
        #[arg(long, default_value_t = 100.0)]
        max: f64,
        #[arg(long, default_value_t = 41)]
        samples: usize,
    },
    /// Re-verify a dumped state.
    Check {
        dump: PathBuf,
        #[arg(long, default_value_t = 1e-8)]
        residual_tol: f64,
        #[arg(long, default_value_t = 1e-6)]
        dissipation_tol: f64,
        #[arg(long, default_value_t = 1e-12)]
        mass_tol: f64,
        #[arg(long, default_value_t = 1e-8)]
        boundary_tol: f64,
    },
}

/// A failure with its exit code.
struct Failure(u8, String);

impl From<ShallowError> for Failure {
    fn from(e: ShallowError) -> Self {
        let code = match e {
            ShallowError::Config(_)
            | ShallowError::InvalidParams(_)
            | ShallowError::InvalidGrid(_)
            | ShallowError::InvalidCase { .. }
            | ShallowError::NonPositivePhysical(_) => EXIT_CONFIG,
            _ => EXIT_SOLVER,
        };
        Failure(code, e.to_string())
    }
}

type CmdResult = Result<(), Failure>;

fn init_threads() {
    let Ok(raw) = std::env::var("SHALLOW_THREADS") else { return };
    match raw.trim().parse::<usize>() {
        Ok(n) if n > 0 => {
            if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                warn!("could not size the thread pool: {e}");
            }
        }
        _ => warn!("ignoring SHALLOW_THREADS={raw}: expected a positive integer"),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    init_threads();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve(run) => cmd_solve(&run, None),
        Command::Reduce1d { run, case } => cmd_solve(&run, Some(case)),
        Command::Sweep(run) => cmd_sweep(&run),
        Command::Classify { gamma, mu, sigma, dim, regime, json } => {
            cmd_classify(gamma, mu, sigma, dim, &regime, json.as_deref())
        }
        Command::Dispersion { sigma, min, max, samples } => cmd_dispersion(sigma, min, max, samples),
        Command::Check { dump, residual_tol, dissipation_tol, mass_tol, boundary_tol } => {
            let t = CheckThresholds {
                residual: residual_tol,
                dissipation: dissipation_tol,
                mass_mean: mass_tol,
                boundary: boundary_tol,
                ..CheckThresholds::default()
            };
            cmd_check(&dump, &t)
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}

fn load(run: &RunArgs) -> Result<(RunConfig, PathBuf), Failure> {
    let cfg = RunConfig::load(&run.config, &run.overrides)?;
    let out = run.out.clone().unwrap_or_else(|| cfg.base_dir.join(&cfg.output.directory));
    Ok((cfg, out))
}

fn initial_state(cfg: &RunConfig, init: Option<&Path>) -> Result<State, Failure> {
    let grid = cfg.grid()?;
    match init {
        None => Ok(State::zeros(&grid)),
        Some(dir) => {
            let dump = read_dump(dir).map_err(|e| Failure(EXIT_CONFIG, format!("--init: {e}")))?;
            if *dump.grid != *grid {
                return Err(Failure(EXIT_CONFIG, "--init: dump grid differs from the config grid".into()));
            }
            Ok(dump.state)
        }
    }
}

#[derive(Serialize)]
struct RunRecord<'a> {
    version: &'a str,
    solver: &'a str,
    report: &'a SolveReport,
    fore_aft_moment: Option<f64>,
    spectral_tail: f64,
}

fn write_outputs(
    dir: &Path,
    cfg: &RunConfig,
    data: &ForcingData,
    report: &SolveReport,
    solver: &str,
) -> Result<(), Failure> {
    let state = &report.final_state;
    let forcing = forcing_poly(&state.eta, data, &report.params)?;
    let center = cfg.forcing_center();
    let formats = &cfg.output.formats;
    if formats.contains(&Format::F64) {
        write_dump(
            dir,
            &DumpContents {
                version: VERSION,
                params: &report.params,
                state,
                data,
                forcing: &forcing,
                center: Some(center.clone()),
                config: Some(cfg.to_toml()),
            },
        )?;
    } else {
        std::fs::create_dir_all(dir).map_err(ShallowError::from)?;
    }
    if formats.contains(&Format::Csv) {
        write_eta_csv(&dir.join("eta.csv"), &state.eta)?;
    }
    if formats.contains(&Format::Json) {
        let moment = (state.eta.max_abs() > 0.0).then(|| fore_aft_moment(&state.eta, &center));
        let record =
            RunRecord { version: VERSION, solver, report, fore_aft_moment: moment, spectral_tail: spectral_tail(&state.eta) };
        write_json(&dir.join("report.json"), &record)?;
    }
    Ok(())
}

fn cmd_solve(run: &RunArgs, reduce: Option<Option<u8>>) -> CmdResult {
    let (cfg, out) = load(run)?;
    let grid = cfg.grid()?;
    let data = cfg.forcing_data(&grid)?;
    let case = match reduce {
        Some(flag) => Some(
            flag.or(cfg.reduced.map(|r| r.case))
                .ok_or_else(|| Failure(EXIT_CONFIG, "reduced.case: reduce1d needs a case".into()))?,
        ),
        None => cfg.reduced.filter(|_| cfg.params.gamma != 1.0).map(|r| r.case),
    };
    let (report, err, solver) = match case {
        Some(case) => {
            if run.init.is_some() {
                warn!("--init is ignored by the reduced solver");
            }
            let (r, e) = solve_1d_detailed(&cfg.params, &data, case, &cfg.solver)?;
            (r, e, "reduced_1d")
        }
        None => {
            let init = initial_state(&cfg, run.init.as_deref())?;
            let (r, e) = newton_solve_detailed(&cfg.params, &data, &init, &cfg.solver)?;
            (r, e, "newton")
        }
    };
    write_outputs(&out, &cfg, &data, &report, solver)?;
    info!("wrote {}", out.display());
    println!(
        "{} after {} iterations, residual {:.3e}, output {}",
        if report.converged { "converged" } else { "not converged" },
        report.iterations,
        report.final_residual,
        out.display()
    );
    match err {
        None => Ok(()),
        Some(e) => Err(Failure(EXIT_SOLVER, e.to_string())),
    }
}

#[derive(Serialize)]
struct SweepRow {
    params: Params,
    amplitude: f64,
    converged: bool,
    iterations: usize,
    final_residual: f64,
    substeps: usize,
    diff_x0: f64,
    limits: [f64; 5],
}

#[derive(Serialize)]
struct SweepRecord {
    version: &'static str,
    points: Vec<SweepRow>,
    limits: LimitReport,
}

fn cmd_sweep(run: &RunArgs) -> CmdResult {
    let (cfg, out) = load(run)?;
    let grid = cfg.grid()?;
    let plan = cfg
        .sweep_plan(&grid)?
        .ok_or_else(|| Failure(EXIT_CONFIG, "sweep: the config has no [sweep] section".into()))?;
    let points = sweep(&plan, &cfg.solver)?;
    let limits = limit_report(&points);
    let rows = points
        .iter()
        .map(|p| SweepRow {
            params: p.params,
            amplitude: p.amplitude,
            converged: p.report.converged,
            iterations: p.report.iterations,
            final_residual: p.report.final_residual,
            substeps: p.substeps,
            diff_x0: p.diff_x0,
            limits: p.limits.columns(),
        })
        .collect();
    let last = points.last().expect("a sweep has at least one point");
    write_outputs(&out.join("final"), &cfg, &plan.forcing, &last.report, "newton")?;
    write_json(&out.join("sweep.json"), &SweepRecord { version: VERSION, points: rows, limits: limits.clone() })?;
    println!("{:>10} {:>10} {:>10} {:>6} {:>12}", "gamma", "mu", "sigma", "iters", "diff_x0");
    for p in &points {
        println!(
            "{:>10.6} {:>10.6} {:>10.6} {:>6} {:>12.4e}",
            p.params.gamma, p.params.mu, p.params.sigma, p.report.iterations, p.diff_x0
        );
    }
    println!("limit norms bounded: {}", if limits.bounded { "yes" } else { "no" });
    Ok(())
}

fn parse_regime(s: &str) -> Result<Regime, Failure> {
    match s {
        "omnisonic" => Ok(Regime::Omnisonic),
        "subsonic" => Ok(Regime::Subsonic),
        _ => Err(Failure(EXIT_CONFIG, format!("regime: unknown value `{s}`"))),
    }
}

fn cmd_classify(gamma: f64, mu: f64, sigma: f64, dim: usize, regime: &str, json: Option<&Path>) -> CmdResult {
    if !(1..=3).contains(&dim) {
        return Err(Failure(EXIT_CONFIG, format!("dim: {dim} is not 1, 2 or 3")));
    }
    let params = Params::new(gamma, mu, sigma, parse_regime(regime)?)?;
    let report = adn_classify(&params, dim);
    println!("{}", report.summary_line());
    if let Some(path) = json {
        write_json(path, &report)?;
    }
    Ok(())
}

fn cmd_dispersion(sigma: f64, min: f64, max: f64, samples: usize) -> CmdResult {
    if !(sigma >= 0.0) {
        return Err(Failure(EXIT_CONFIG, "sigma: must be nonnegative".into()));
    }
    if !(min > 0.0 && max >= min && samples > 0) {
        return Err(Failure(EXIT_CONFIG, "min, max, samples: need 0 < min <= max and samples > 0".into()));
    }
    println!("xi,phase_speed,group_speed");
    for xi in log_spaced(min, max, samples) {
        let s = dispersion(&[xi], sigma);
        println!("{xi:.10e},{:.17e},{:.17e}", s.phase_speed, s.group_speed);
    }
    Ok(())
}

fn cmd_check(dir: &Path, t: &CheckThresholds) -> CmdResult {
    let dump = read_dump(dir).map_err(|e| Failure(EXIT_CONFIG, e.to_string()))?;
    let checks = check_state(&dump.state, &dump.manifest.params, &dump.data, t)?;
    for c in &checks {
        println!("{}", c.line());
    }
    if all_passed(&checks) {
        Ok(())
    } else {
        Err(Failure(EXIT_CHECK, "some checks failed".into()))
    }
}

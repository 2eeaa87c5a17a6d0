//! Acceptance criteria 1-10. Each prints one PASS/FAIL line; the process fails if any criterion fails.
//!
//! `cargo test --test acceptance -- 3 7` runs a subset.

use std::f64::consts::PI;
use std::sync::Arc;
use std::time::Instant;

use num_complex::Complex64;

use shallow::continuation::{limit_report, sweep, SweepPlan};
use shallow::diagnostics::{fore_aft_moment, spectral_tail};
use shallow::forward::{
    apply_linearized, apply_principal, apply_q_s_split, apply_remainder, apply_trivial_linearization, forcing_poly,
    residual, ForcingData, Residual,
};
use shallow::io::RunConfig;
use shallow::linear::{
    adn_classify, check_chi_bound, check_detp_bound, detp_symbol, dispersion, log_spaced, multiplier_ratio_range,
    principal_symbol, region_of, sample_frequencies,
};
use shallow::solver::{newton_solve, newton_solve_detailed, solve_1d, solve_trivial, NewtonConfig, SolveReport, TrivialBackend};
use shallow::spectral::ops::{dealias, gradient};
use shallow::spectral::random::{band_limited, band_limited_zero_mean, smooth_random};
use shallow::spectral::x0_norm;
use shallow::{Grid, Params, SpectralField, State};

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Outcome { pass, detail: detail.into() }
    }
}

/// Converged states met along the way, re-checked by criterion 8.
#[derive(Default)]
struct Seen {
    worst_dissipation: f64,
    worst_mass_mean: f64,
    count: usize,
}

impl Seen {
    fn record(&mut self, r: &SolveReport) {
        if r.converged {
            self.count += 1;
            self.worst_dissipation = self.worst_dissipation.max(r.dissipation_residual);
            self.worst_mass_mean = self.worst_mass_mean.max(r.mass_mean);
        }
    }
}

fn p(g: f64, mu: f64, sigma: f64) -> Params {
    Params::omnisonic(g, mu, sigma).unwrap()
}

const PATTERNS: [(f64, f64); 4] = [(0.3, 0.2), (0.3, 0.0), (0.0, 0.2), (0.0, 0.0)];

// Criterion 1

/// Orders, verdict and principal-part string as read off the ellipticity table.
fn table_row(d: usize, mu: f64, sigma: f64, gamma: f64) -> (u32, u32, bool, String) {
    let pw = |base: &str, e: usize| match e {
        0 => String::new(),
        1 => base.to_string(),
        _ => format!("{base}^{e}"),
    };
    let join = |a: String, b: String| match (a.is_empty(), b.is_empty()) {
        (true, _) => b,
        (_, true) => a,
        _ => format!("{a}*{b}"),
    };
    let du = d as u32;
    match (mu > 0.0, sigma > 0.0) {
        (true, true) => (2 * du + 2, 2 * du + 2, true, join("sigma^2*Lap^2".into(), pw("(-mu^2*Lap)", d - 1))),
        (true, false) => (2 * du + 1, 2 * du + 1, d == 1, join("-4*gamma*d1".into(), pw("(-mu^2*Lap)", d))),
        (false, true) => (du + 3, du + 3, d == 1, join(pw("(-gamma*d1)", d - 1), "sigma^2*Lap^2".into())),
        (false, false) => {
            if d >= 2 {
                (du + 1, du + 1, false, join(pw("(-gamma*d1)", d - 1), "(gamma^2*d1^2-Lap)".into()))
            } else if gamma != 1.0 {
                (2, 2, true, "(gamma^2-1)*d1^2".into())
            } else {
                (2, 1, false, "-d1".into())
            }
        }
    }
}

/// Symbol of the table's principal part, with `d1 -> 2 pi i xi_1` and `Lap -> -4 pi^2 |xi|^2`.
fn table_principal(d: usize, mu: f64, sigma: f64, gamma: f64, xi: &[f64]) -> Complex64 {
    let d1 = Complex64::new(0.0, 2.0 * PI * xi[0]);
    let lap = Complex64::new(-4.0 * PI * PI * xi.iter().map(|x| x * x).sum::<f64>(), 0.0);
    let e = d as i32;
    match (mu > 0.0, sigma > 0.0) {
        (true, true) => sigma * sigma * lap * lap * (-mu * mu * lap).powi(e - 1),
        (true, false) => -4.0 * gamma * d1 * (-mu * mu * lap).powi(e),
        (false, true) => (-gamma * d1).powi(e - 1) * sigma * sigma * lap * lap,
        (false, false) => {
            if d >= 2 {
                (-gamma * d1).powi(e - 1) * (gamma * gamma * d1 * d1 - lap)
            } else if gamma != 1.0 {
                (gamma * gamma - 1.0) * d1 * d1
            } else {
                -d1
            }
        }
    }
}

fn unit_directions(d: usize) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = sample_frequencies(d, 1.0, 1.0, 64);
    for a in 0..d {
        let mut e = vec![0.0; d];
        e[a] = 1.0;
        out.push(e);
    }
    out
}

fn criterion_1(_: &mut Seen) -> Outcome {
    let mut mismatches = Vec::new();
    let mut cases = 0;
    for d in 1..=3 {
        for (mu, sigma) in PATTERNS {
            for gamma in [0.5, 1.0, 2.0] {
                cases += 1;
                let params = p(gamma, mu, sigma);
                let rep = adn_classify(&params, d);
                let (big_r, r, elliptic, principal) = table_row(d, mu, sigma, gamma);
                let tag = format!("d={d} mu={mu} sigma={sigma} gamma={gamma}");
                if (rep.big_r, rep.r, rep.elliptic) != (big_r, r, elliptic) || rep.principal_part != principal {
                    mismatches.push(format!("{tag}: table"));
                }
                let dirs = unit_directions(d);
                let want: Vec<Complex64> = dirs.iter().map(|xi| table_principal(d, mu, sigma, gamma, xi)).collect();
                let min_principal = want.iter().map(|w| w.norm()).fold(f64::INFINITY, f64::min);
                let scale = want.iter().map(|w| w.norm()).fold(0.0, f64::max);
                let t = 1e7;
                let bad = dirs.iter().zip(&want).find(|(xi, w)| {
                    let got = principal_symbol(&params, d, xi);
                    let scaled: Vec<f64> = xi.iter().map(|x| t * x).collect();
                    let lead = detp_symbol(&scaled, &params, d) / t.powi(r as i32);
                    (got - **w).norm() > 1e-12 * scale || (lead - **w).norm() > 1e-5 * scale
                });
                if let Some((xi, _)) = bad {
                    mismatches.push(format!("{tag}: principal part at {xi:?}"));
                }
                let numeric_elliptic = r == big_r && min_principal > 1e-12;
                if numeric_elliptic != rep.elliptic {
                    mismatches.push(format!("{tag}: numeric verdict"));
                }
            }
        }
    }
    Outcome::new(mismatches.is_empty(), format!("{cases} cases, mismatches: {mismatches:?}"))
}

// Criterion 2

fn criterion_2(_: &mut Seen) -> Outcome {
    let nondispersive = log_spaced(1e-3, 1e4, 200)
        .into_iter()
        .all(|r| {
            let s = dispersion(&[r * 0.6, r * 0.8], 0.0);
            s.phase_speed == 1.0 && s.group_speed == 1.0
        });
    let mut worst: f64 = 0.0;
    for sigma in [0.003, 0.1, 1.0, 10.0] {
        let s = dispersion(&[100.0 / sigma], sigma);
        worst = worst.max((s.group_speed / s.phase_speed - 2.0).abs());
    }
    Outcome::new(nondispersive && worst < 1e-3, format!("sigma=0 exact: {nondispersive}; max |group/phase - 2| = {worst:.2e}"))
}

// Criterion 3

fn criterion_3(_: &mut Seen) -> Outcome {
    let mut chi_viol = 0;
    let mut det_viol = 0;
    let mut det_min: f64 = f64::INFINITY;
    let mut chi_min: f64 = f64::INFINITY;
    let mut worst = String::new();
    for d in [1, 2] {
        let freqs = sample_frequencies(d, 1e-4, 1e4, 10_000);
        for g in [0.5, 1.0, 2.0] {
            for m in [0.5, 1.0, 2.0] {
                for s in [0.5, 1.0, 2.0] {
                    let params = p(g, m / 10.0, s / 10.0);
                    let c = check_chi_bound(&params, &freqs);
                    let dp = check_detp_bound(&params, &freqs);
                    chi_viol += c.violations;
                    det_viol += dp.violations;
                    chi_min = chi_min.min(c.min_ratio);
                    if dp.min_ratio < det_min {
                        det_min = dp.min_ratio;
                        worst = format!("d={d} (gamma,mu,sigma)=({g},{},{}) xi={:?}", m / 10.0, s / 10.0, dp.worst_xi);
                    }
                }
            }
        }
    }
    Outcome::new(
        chi_viol == 0 && det_viol == 0,
        format!(
            "chi: {chi_viol} violations (min ratio {chi_min:.4}); detP: {det_viol} violations (min ratio {det_min:.4} at {worst})"
        ),
    )
}

// Criterion 4

fn criterion_4(_: &mut Seen) -> Outcome {
    let mut worst_roundtrip: f64 = 0.0;
    let mut worst_backend: f64 = 0.0;
    for (ext, pts) in [(vec![7.0], vec![256]), (vec![7.0, 9.0], vec![256, 256])] {
        let g = Grid::new(&ext, &pts).unwrap();
        let d = g.dim();
        let (h, f) = (band_limited_zero_mean(&g, 1, 11), band_limited(&g, d, 12));
        let data = Residual { h: h.clone(), f: f.clone() };
        let scale = h.max_abs().max(f.max_abs());
        for gamma in [0.5, 1.0, 2.0] {
            for (mu, sigma) in PATTERNS {
                let params = p(gamma, mu, sigma);
                let s = solve_trivial(&h, &f, &params, TrivialBackend::MatrixSymbol).unwrap();
                let err = apply_trivial_linearization(&s, &params).sub(&data).max_abs() / scale;
                worst_roundtrip = worst_roundtrip.max(err);
                if mu > 0.0 && sigma > 0.0 {
                    let a = solve_trivial(&h, &f, &params, TrivialBackend::Decoupled).unwrap();
                    let sc = s.v.max_abs().max(s.eta.max_abs());
                    let e = a.v.sub(&s.v).max_abs().max(a.eta.sub(&s.eta).max_abs()) / sc;
                    worst_backend = worst_backend.max(e);
                }
            }
        }
    }
    Outcome::new(
        worst_roundtrip <= 1e-10 && worst_backend <= 1e-11,
        format!("roundtrip {worst_roundtrip:.2e} (tol 1e-10), backends {worst_backend:.2e} (tol 1e-11)"),
    )
}

// Criterion 5

fn smooth_state(g: &Arc<Grid>, seed: u64, amp: f64) -> State {
    let eta = smooth_random(g, 1, seed + 1, 0.2);
    let eta = eta.add_constant(-eta.mean(0)).scale(amp);
    State::new(smooth_random(g, g.dim(), seed, 0.2).scale(amp), eta).unwrap()
}

fn criterion_5(_: &mut Seen) -> Outcome {
    let g = Grid::new(&[30.0, 30.0], &[128, 128]).unwrap();
    let fine = Grid::new(&[30.0, 30.0], &[256, 256]).unwrap();
    let d = g.dim();
    let mut min_order = f64::INFINITY;
    let mut worst_pr: f64 = 0.0;
    let mut worst_qs: f64 = 0.0;
    for pair in 0..20u64 {
        let params = p([0.992, 1.008, 0.5, 2.0][pair as usize % 4], [0.0078, 0.0, 0.2][pair as usize % 3], [0.003, 0.1, 0.0][pair as usize % 3]);
        let s0 = smooth_state(&g, 100 + 10 * pair, 0.05);
        let dir = smooth_state(&g, 105 + 10 * pair, 1.0);
        let data = ForcingData::new(
            vec![smooth_random(&g, d * d, 200 + pair, 0.2).scale(0.1), smooth_random(&g, d * d, 300 + pair, 0.2).scale(0.1)],
            vec![smooth_random(&g, d, 400 + pair, 0.2).scale(0.1), smooth_random(&g, d, 500 + pair, 0.2).scale(0.1)],
        )
        .unwrap();
        let full = |s: &State, data: &ForcingData| {
            let f = forcing_poly(&s.eta, data, &params).unwrap();
            residual(s, &params, &f).unwrap()
        };
        let cd = |h: f64, data: &ForcingData| full(&s0.axpy(h, &dir), data).sub(&full(&s0.axpy(-h, &dir), data)).scale(0.5 / h);

        let jv = apply_linearized(&s0, &params, &data, &dir).unwrap();
        let errs: Vec<f64> = [4e-2, 2e-2, 1e-2].iter().map(|&h| cd(h, &data).sub(&jv).y0_norm()).collect();
        for w in errs.windows(2) {
            min_order = min_order.min((w[0] / w[1]).log2());
        }

        // Without forcing the residual is cubic, so Richardson-extrapolated central differences are exact.
        let zero = ForcingData::zeros(&g, 0);
        let h = 1e-2;
        let exact = cd(h / 2.0, &zero).scale(4.0 / 3.0).sub(&cd(h, &zero).scale(1.0 / 3.0));
        let pr = apply_principal(&s0, &params, &dir).unwrap();
        let pr = Residual { h: pr.h, f: pr.f.add(&apply_remainder(&s0, &params, &dir).unwrap()) };
        worst_pr = worst_pr.max(pr.sub(&exact).max_abs() / exact.max_abs());


        // The split holds pointwise up to the aliasing of v / (1 + eta), so it is checked on a finer grid.
        let s0 = smooth_state(&fine, 100 + 10 * pair, 0.05);
        let dir = smooth_state(&fine, 105 + 10 * pair, 1.0);
        let (q, s) = apply_q_s_split(&s0, &params, &dir.v, &dir.eta).unwrap();
        let u = s0.eta.map(|e| 1.0 / (1.0 + e)).mul(&dir.v);
        let lhs = apply_principal(&s0, &params, &State::new(u, dir.eta.clone()).unwrap()).unwrap();
        let rhs = Residual { h: q.h, f: q.f.add(&s) };
        worst_qs = worst_qs.max(lhs.sub(&rhs).max_abs() / lhs.max_abs());
    }
    Outcome::new(
        min_order >= 1.9 && worst_pr <= 1e-10 && worst_qs <= 1e-10,
        format!("min observed order {min_order:.3} (>= 1.9); P+(0,R) {worst_pr:.2e}; Q+(0,S) {worst_qs:.2e} (tol 1e-10)"),
    )
}

// Criterion 6

/// A localized state satisfying the mass equation exactly; its momentum residual becomes the forcing.
fn manufactured(g: &Arc<Grid>, params: &Params, amp: f64) -> (State, ForcingData) {
    let c: Vec<f64> = g.extent().iter().map(|l| l / 2.0).collect();
    let bump = |w: f64, shift: f64| {
        let c = c.clone();
        SpectralField::scalar_from_fn(g, move |x| {
            let r2: f64 = x.iter().zip(&c).map(|(a, b)| (a - b - shift).powi(2)).sum();
            (-r2 / (2.0 * w * w)).exp()
        })
    };
    let eta = bump(1.2, 0.0).sub(&bump(0.8, 0.5).scale(0.4)).scale(amp);
    let eta = dealias(&eta.add_constant(-eta.mean(0)));
    let stream = gradient(&bump(1.0, 0.2).scale(amp));
    let inv = eta.map(|e| 1.0 / (1.0 + e));
    let vx = eta.scale(params.gamma).add(&stream.component(1)).mul(&inv);
    let vy = stream.component(0).scale(-1.0).mul(&inv);
    let truth = State::new(SpectralField::stack(&[&vx, &vy]), eta).unwrap();
    let r = residual(&truth, params, &SpectralField::zeros(g, 2)).unwrap();
    (truth, ForcingData::from_phi0(r.f.scale(-1.0)))
}

/// Ratios of successive residuals shrink over the last steps and the final one is small.
fn superlinear(history: &[f64]) -> bool {
    let q: Vec<f64> = history.windows(2).map(|w| w[1] / w[0]).collect();
    q.len() >= 2 && q.windows(2).rev().take(2).all(|w| w[1] <= w[0]) && *q.last().unwrap() < 1e-2
}

fn criterion_6(seen: &mut Seen) -> Outcome {
    let g = Grid::new(&[20.0, 20.0], &[256, 256]).unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    for params in [p(0.992, 0.0078, 0.003), p(1.008, 0.0, 0.0)] {
        let (truth, data) = manufactured(&g, &params, 0.05);
        let rep = newton_solve(&params, &data, &State::zeros(&g), &NewtonConfig::default()).unwrap();
        seen.record(&rep);
        let err = x0_norm(&rep.final_state.sub(&truth));
        let sl = superlinear(&rep.residual_history);
        pass &= rep.converged && err <= 1e-9 && sl;
        let hist: Vec<String> = rep.residual_history.iter().map(|r| format!("{r:.1e}")).collect();
        parts.push(format!(
            "({},{},{}): X0 error {err:.2e}, history [{}], superlinear {sl}",
            params.gamma,
            params.mu,
            params.sigma,
            hist.join(" ")
        ));
    }
    Outcome::new(pass, parts.join("; "))
}

// Criterion 7

fn preset(n: usize, gamma: f64, mu: f64, sigma: f64) -> RunConfig {
    let text = format!(
        "[grid]\nextent = [20.0, 20.0]\npoints = [{n}, {n}]\n\n[params]\ngamma = {gamma}\nmu = {mu}\nsigma = {sigma}\n\n[forcing]\nmode = \"gaussian_preset\"\n"
    );
    RunConfig::parse(&text, &[]).unwrap()
}

fn criterion_7(seen: &mut Seen) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    let mut worst_tail: f64 = 0.0;
    for (mu, sigma) in [(0.0078, 0.003), (0.0, 0.0), (0.0078, 0.0), (0.0, 0.003)] {
        let mut moments = Vec::new();
        for gamma in [0.992, 1.008] {
            let cfg = preset(256, gamma, mu, sigma);
            let g = cfg.grid().unwrap();
            let data = cfg.forcing_data(&g).unwrap();
            let (rep, err) = newton_solve_detailed(&cfg.params, &data, &State::zeros(&g), &cfg.solver).unwrap();
            seen.record(&rep);
            let ok = err.is_none() && rep.converged && rep.final_residual <= 1e-8;
            pass &= ok;
            let tail = spectral_tail(&rep.final_state.eta);
            worst_tail = worst_tail.max(tail);
            moments.push(fore_aft_moment(&rep.final_state.eta, &cfg.forcing_center()));
            if !ok {
                parts.push(format!("({gamma},{mu},{sigma}) did not converge: {err:?}"));
            }
        }
        let ratio = moments[1].abs() / moments[0].abs();
        pass &= ratio >= 3.0;
        parts.push(format!("mu={mu} sigma={sigma}: moments {:.4}/{:.4}, ratio {ratio:.3}", moments[0], moments[1]));
    }
    pass &= worst_tail <= 1e-6;
    parts.push(format!("worst spectral tail {worst_tail:.2e} (needs <= 1e-6)"));
    Outcome::new(pass, parts.join("; "))
}

// Criterion 8

fn criterion_8(seen: &mut Seen) -> Outcome {
    for (gamma, mu, sigma) in [(0.992, 0.0078, 0.003), (1.008, 0.0078, 0.003), (1.008, 0.0, 0.0)] {
        let cfg = preset(128, gamma, mu, sigma);
        let g = cfg.grid().unwrap();
        let data = cfg.forcing_data(&g).unwrap();
        let rep = newton_solve(&cfg.params, &data, &State::zeros(&g), &cfg.solver).unwrap();
        seen.record(&rep);
    }
    let mut worst_zero: f64 = 0.0;
    for (ext, pts) in [(vec![20.0], vec![128]), (vec![20.0, 20.0], vec![64, 64])] {
        let g = Grid::new(&ext, &pts).unwrap();
        for params in [p(0.992, 0.0078, 0.003), p(1.008, 0.0, 0.0), p(0.5, 0.2, 0.1), p(2.0, 0.0, 0.1)] {
            let zero = ForcingData::zeros(&g, 1);
            for init in [State::zeros(&g), smooth_state(&g, 7, 1e-3)] {
                let rep = newton_solve(&params, &zero, &init, &NewtonConfig::default()).unwrap();
                worst_zero = worst_zero.max(if rep.converged { x0_norm(&rep.final_state) } else { f64::INFINITY });
            }
        }
    }
    let pass = seen.count > 0 && seen.worst_dissipation <= 1e-6 && seen.worst_mass_mean <= 1e-12 && worst_zero <= 1e-10;
    Outcome::new(
        pass,
        format!(
            "{} converged states: dissipation {:.2e} (tol 1e-6), mass mean {:.2e} (tol 1e-12); zero forcing |state|_X0 {worst_zero:.2e} (tol 1e-10)",
            seen.count, seen.worst_dissipation, seen.worst_mass_mean
        ),
    )
}

// Criterion 9

fn criterion_9(seen: &mut Seen) -> Outcome {
    let start = p(0.992, 0.0078, 0.003);
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, end) in [("sigma", start.with(0.992, 0.0078, 0.0)), ("mu", start.with(0.992, 0.0, 0.003))] {
        let cfg = preset(128, 0.992, 0.0078, 0.003);
        let g = cfg.grid().unwrap();
        let data = cfg.forcing_data(&g).unwrap();
        let mut max_diff = Vec::new();
        for steps in [8, 16] {
            let plan = SweepPlan::segment(&start, &end, steps, data.clone());
            match sweep(&plan, &cfg.solver) {
                Ok(points) => {
                    points.iter().for_each(|pt| seen.record(&pt.report));
                    let all = points.iter().all(|pt| pt.report.converged);
                    let lim = limit_report(&points);
                    pass &= all && lim.bounded;
                    max_diff.push(lim.max_step_difference);
                    let growth: Vec<String> = lim.growth.iter().map(|g| format!("{g:.3}")).collect();
                    parts.push(format!("{name} x{steps}: max dX0 {:.3e}, growth [{}]", lim.max_step_difference, growth.join(" ")));
                }
                Err(e) => {
                    pass = false;
                    max_diff.push(f64::NAN);
                    parts.push(format!("{name} x{steps}: {e}"));
                }
            }
        }
        let shrink = 1.0 - max_diff[1] / max_diff[0];
        pass &= shrink >= 0.25;
        parts.push(format!("{name} shrink {:.1}%", 100.0 * shrink));
    }
    Outcome::new(pass, parts.join("; "))
}

// Criterion 10

fn criterion_10(seen: &mut Seen) -> Outcome {
    let cfg = NewtonConfig::default();
    let mut pass = true;
    let mut parts = Vec::new();
    // Near-sonic solutions steepen and need a finer grid before the two discretizations agree.
    for (params, case, n) in
        [(p(0.5, 0.1, 0.1), 1, 256), (p(0.992, 0.0078, 0.003), 1, 2048), (p(1.5, 0.1, 0.1), 3, 256), (p(1.008, 0.0078, 0.003), 3, 2048)]
    {
        let g = Grid::new(&[20.0], &[n]).unwrap();
        let bump = SpectralField::scalar_from_fn(&g, |x| 0.02 * (-(x[0] - 10.0).powi(2) / 0.5).exp());
        let data = ForcingData::from_phi0(dealias(&gradient(&bump).scale(-1.0)));
        let a = solve_1d(&params, &data, case, &cfg).unwrap();
        let b = newton_solve(&params, &data, &State::zeros(&g), &cfg).unwrap();
        seen.record(&a);
        seen.record(&b);
        let diff = x0_norm(&a.final_state.sub(&b.final_state));
        pass &= a.converged && b.converged && diff <= 1e-8;
        parts.push(format!("case {case} ({},{},{}) N={n}: X0 diff {diff:.2e}", params.gamma, params.mu, params.sigma));
    }
    let mut freqs = vec![0.0];
    freqs.extend(log_spaced(1e-4, 1e4, 10_000));
    let mut min_ratio = [f64::INFINITY; 3];
    for gamma in [0.3, 0.9, 0.99, 1.01, 1.5, 3.0] {
        for mu in [0.0, 0.01, 0.1, 1.0] {
            for sigma in [0.0, 0.01, 0.1, 1.0] {
                let params = p(gamma, mu, sigma);
                for case in region_of(&params) {
                    let (lo, _) = multiplier_ratio_range(case, &params, &freqs).unwrap();
                    min_ratio[case as usize - 1] = min_ratio[case as usize - 1].min(lo);
                }
            }
        }
    }
    // The case-3 lower bound may shrink like mu + sigma, not faster.
    let mut scaled = Vec::new();
    for eps in [1e-1, 1e-2, 1e-3, 1e-4] {
        let params = p(1.5, eps / 2.0, eps / 2.0);
        let (lo, _) = multiplier_ratio_range(3, &params, &freqs).unwrap();
        scaled.push(lo / eps);
    }
    let degrade_ok = scaled.iter().all(|s| *s >= 0.5 * scaled[0]);
    pass &= min_ratio.iter().all(|m| *m > 0.0) && degrade_ok;
    parts.push(format!("min |m/p^i| = {:.3e} / {:.3e} / {:.3e}", min_ratio[0], min_ratio[1], min_ratio[2]));
    let sc: Vec<String> = scaled.iter().map(|s| format!("{s:.3}")).collect();
    parts.push(format!("case 3 bound / (mu+sigma) = [{}]", sc.join(" ")));
    Outcome::new(pass, parts.join("; "))
}

type Criterion = fn(&mut Seen) -> Outcome;

fn main() {
    let criteria: [(&str, f64, Criterion); 10] = [
        ("ADN table", 1.0, criterion_1),
        ("dispersion", 1.0, criterion_2),
        ("symbol lower bounds", 5.0, criterion_3),
        ("trivial linearization", 10.0, criterion_4),
        ("jacobian", 30.0, criterion_5),
        ("manufactured solve", 120.0, criterion_6),
        ("figure 1 reproduction", 600.0, criterion_7),
        ("physics identities", 60.0, criterion_8),
        ("vanishing limits", 900.0, criterion_9),
        ("1D cross-validation", 60.0, criterion_10),
    ];
    let selected: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut seen = Seen::default();
    let mut failed = Vec::new();
    for (i, (name, budget, run)) in criteria.iter().enumerate() {
        let n = i + 1;
        if !selected.is_empty() && !selected.contains(&n) {
            continue;
        }
        let t = Instant::now();
        let out = run(&mut seen);
        let secs = t.elapsed().as_secs_f64();
        let pass = out.pass && secs <= *budget;
        println!(
            "criterion {n:>2} {}: {name} [{secs:.1}s of {budget:.0}s] {}",
            if pass { "PASS" } else { "FAIL" },
            out.detail
        );
        if !pass {
            failed.push(n);
        }
    }
    if !failed.is_empty() {
        println!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}

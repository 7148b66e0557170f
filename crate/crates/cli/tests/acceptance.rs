//! Acceptance suite: one PASS/FAIL line per criterion.

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use loschmidt_cli::{run, CliError, RunConfig};
use loschmidt_core::estimators::{f0, f1_dr, f1_path, f2_gaussian_chain, f2_mc, f2_path};
use loschmidt_core::hamiltonians::expansion_remainder;
use loschmidt_core::presets::{self, displaced_ho_product, Scenario};
use loschmidt_core::qgrid::{fidelity_exact, GridWavefunction, KickedMap};
use loschmidt_core::spectra::spectrum;
use loschmidt_core::{
    make_pair, F2Contour, FidelitySeries, GaussianComponent, InitialState, PhasePoint, Profile, Reference,
    SeparableHamiltonian, SeriesMeta,
};
use num_complex::Complex64;

type Verdict = Result<String, String>;

fn exact(s: &Scenario, n_steps: usize) -> FidelitySeries {
    fidelity_exact(&s.state, &s.pair, n_steps, s.tau, s.hbar, &s.grid).unwrap()
}

/// Largest `|f - f_ref| / (3·stderr + floor)` over all steps.
fn worst_ratio(est: &FidelitySeries, reference: &FidelitySeries, floor: f64) -> f64 {
    est.values
        .iter()
        .zip(&reference.values)
        .zip(&est.stderr)
        .map(|((a, b), e)| (a - b).norm() / (3.0 * e + floor))
        .fold(0.0, f64::max)
}

fn verdict(pass: bool, detail: String) -> Verdict {
    if pass {
        Ok(detail)
    } else {
        Err(detail)
    }
}

/// Least-squares slope of `ln y` against `ln x`.
fn log_log_fit(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

fn mixture(parts: &[(f64, f64, f64, f64)]) -> InitialState {
    InitialState::new(
        parts
            .iter()
            .map(|&(q, p, w, weight)| GaussianComponent::new(vec![q], vec![p], vec![w], weight).unwrap())
            .collect(),
    )
    .unwrap()
}

/// Largest per-step band of criterion 1, reused by criterion 2.
struct DrBand {
    max_band: f64,
}

fn dr_exactness(band: &mut DrBand) -> Verdict {
    let s = presets::load("displaced_ho").unwrap();
    let e = exact(&s, s.n_steps);
    let est = f1_dr(&s.state, &s.pair, &s.config(10_000, 7), Reference::Average).unwrap();
    band.max_band = est.stderr.iter().map(|se| 3.0 * se + 1e-6).fold(0.0, f64::max);
    let ratio = worst_ratio(&est, &e, 1e-6);
    verdict(ratio <= 1.0, format!("worst |f1 - f_exact| / band = {ratio:.3} over {} steps", s.n_steps))
}

fn dr_reference_failure(band: &DrBand) -> Verdict {
    let s = presets::load("displaced_ho").unwrap();
    let e = exact(&s, s.n_steps);
    let est = f1_dr(&s.state, &s.pair, &s.config(10_000, 7), Reference::HPrime).unwrap();
    let two_periods = (2.0 * 2.0 * PI / s.tau).floor() as usize;
    let dev = est.deviation(&e);
    let (step, max) = dev[..=two_periods.min(s.n_steps)]
        .iter()
        .enumerate()
        .fold((0, 0.0), |b, (n, &d)| if d > b.1 { (n, d) } else { b });
    let threshold = 10.0 * band.max_band;
    verdict(max >= threshold, format!("max deviation {max:.3e} at step {step} vs 10x band {threshold:.3e}"))
}

fn zeroth_order_exactness() -> Verdict {
    let s = presets::load("linear_gradient").unwrap();
    let n = (10.0 / s.tau).round() as usize;
    let mut cfg = s.config(20_000, 5);
    cfg.n_steps = n;
    let pure = worst_ratio(&f0(&s.state, &s.pair, &cfg).unwrap(), &exact(&s, n), 1e-8);
    let mixed_state = mixture(&[(-1.0, 0.5, 1.0, 0.4), (1.5, -0.3, 0.8, 0.6)]);
    let mixed = Scenario { state: mixed_state, ..s.clone() };
    let mix = worst_ratio(&f0(&mixed.state, &mixed.pair, &cfg).unwrap(), &exact(&mixed, n), 1e-8);
    verdict(pure <= 1.0 && mix <= 1.0, format!("worst ratio pure {pure:.3}, two-component mixture {mix:.3} (t <= 10)"))
}

fn second_order_exactness() -> Verdict {
    let s = presets::load("ho_diff_k").unwrap();
    let mut cfg = s.config(100_000, 3);
    cfg.n_steps = 100;
    let e100 = exact(&s, 100);
    let chain_dev = f2_gaussian_chain(&s.state, &s.pair, &cfg).unwrap().max_deviation(&e100);
    let mc = worst_ratio(&f2_mc(&s.state, &s.pair, &cfg).unwrap(), &e100, 1e-12);

    let e = exact(&s, s.n_steps);
    let dr = f1_dr(&s.state, &s.pair, &s.config(10_000, 7), Reference::Average).unwrap();
    let omega = s.pair.average().potential()[0].curvature(0.0).sqrt();
    let period = (2.0 * PI / omega / s.tau).ceil() as usize;
    let outside = (period..=s.n_steps)
        .filter(|&n| (dr.values[n] - e.values[n]).norm() > 3.0 * dr.stderr[n] + 1e-6)
        .count();
    let beyond = s.n_steps - period + 1;
    verdict(
        chain_dev <= 1e-6 && mc <= 1.0 && 2 * outside > beyond,
        format!(
            "chain max dev {chain_dev:.2e}; f2_mc (1e5 paths) worst ratio {mc:.3}; f1 outside band at {outside}/{beyond} steps after one period"
        ),
    )
}

fn dr_f2_degeneracy() -> Verdict {
    let mut checked = 0;
    for name in ["linear_gradient", "displaced_ho"] {
        let s = presets::load(name).unwrap();
        for contour in [F2Contour::SteepestDescent, F2Contour::RealAxis] {
            let mut cfg = s.config(2_000, 13);
            cfg.f2_contour = contour;
            let a = f1_dr(&s.state, &s.pair, &cfg, Reference::Average).unwrap();
            let b = f2_mc(&s.state, &s.pair, &cfg).unwrap();
            if a.values != b.values {
                return Err(format!("{name} ({contour:?}): reduced series differ"));
            }
            for i in 0..200 {
                if f1_path(&s.state, &s.pair, &cfg, Reference::Average, i).unwrap()
                    != f2_path(&s.state, &s.pair, &cfg, i).unwrap()
                {
                    return Err(format!("{name} ({contour:?}): path {i} differs"));
                }
                checked += 1;
            }
        }
    }
    Ok(format!("bitwise equal series on 2 scenarios x 2 contours; {checked} paths identical"))
}

fn normalization_and_trivial_limits() -> Verdict {
    let one = Complex64::new(1.0, 0.0);
    let mut worst0: f64 = 0.0;
    for name in presets::names() {
        let s = presets::load(name).unwrap();
        let mut cfg = s.config(300, 1);
        cfg.n_steps = 10;
        let mut all = vec![
            exact(&s, 2),
            f0(&s.state, &s.pair, &cfg).unwrap(),
            f1_dr(&s.state, &s.pair, &cfg, Reference::Average).unwrap(),
            f2_mc(&s.state, &s.pair, &cfg).unwrap(),
        ];
        if let Ok(c) = f2_gaussian_chain(&s.state, &s.pair, &cfg) {
            all.push(c);
        }
        for f in &all {
            worst0 = worst0.max((f.values[0] - one).norm());
        }
    }

    let h = SeparableHamiltonian::one_dim(1.0, Profile::harmonic(1.3, 0.2, 0.1)).unwrap();
    let pair = make_pair(h.clone(), h).unwrap();
    let state = InitialState::gaussian(vec![0.4], vec![-0.2], vec![1.1]).unwrap();
    let s = Scenario { pair, state, ..presets::load("displaced_ho").unwrap() };
    let mut cfg = s.config(500, 2);
    cfg.n_steps = 100;
    let all = [
        exact(&s, 100),
        f0(&s.state, &s.pair, &cfg).unwrap(),
        f1_dr(&s.state, &s.pair, &cfg, Reference::Average).unwrap(),
        f2_mc(&s.state, &s.pair, &cfg).unwrap(),
        f2_gaussian_chain(&s.state, &s.pair, &cfg).unwrap(),
    ];
    let worst_zero = all
        .iter()
        .flat_map(|f| f.values.iter().map(|v| (v - one).norm()))
        .fold(0.0, f64::max);
    verdict(
        worst0 <= 1e-12 && worst_zero <= 1e-12,
        format!("max |f(0) - 1| = {worst0:.1e} over all presets; max |f - 1| = {worst_zero:.1e} for zero perturbation"),
    )
}

fn short_time_slope() -> Verdict {
    let base = presets::load("displaced_ho").unwrap();
    // ΔH = q, so the slope is -i<q> = -0.5i.
    let target = Complex64::new(0.0, -0.5);
    let taus = [0.05, 0.025, 0.0125];
    let labels = ["exact", "f0", "f1", "f2"];
    let mut slopes = vec![vec![Complex64::new(0.0, 0.0); taus.len()]; labels.len()];
    for (j, &tau) in taus.iter().enumerate() {
        let s = Scenario { tau, ..base.clone() };
        let mut cfg = s.config(400_000, 17);
        cfg.n_steps = 1;
        let f = [
            exact(&s, 1),
            f0(&s.state, &s.pair, &cfg).unwrap(),
            f1_dr(&s.state, &s.pair, &cfg, Reference::Average).unwrap(),
            f2_mc(&s.state, &s.pair, &cfg).unwrap(),
        ];
        for (i, series) in f.iter().enumerate() {
            slopes[i][j] = (series.values[1] - 1.0) / tau;
        }
    }
    let mut parts = Vec::new();
    let mut pass = true;
    for (i, label) in labels.iter().enumerate() {
        // First-order Richardson extrapolation from the two smallest steps.
        let extrapolated = slopes[i][2] * 2.0 - slopes[i][1];
        let rel = (extrapolated - target).norm() / target.norm();
        pass &= rel <= 0.01;
        parts.push(format!("{label} {:.2}%", 100.0 * rel));
    }
    verdict(pass, format!("extrapolated slope vs -i<dH>: {}", parts.join(", ")))
}

fn unitarity_and_bounds() -> Verdict {
    let mut drift: f64 = 0.0;
    for name in ["displaced_ho", "ho_diff_k", "cubic_perturbation", "morse_like"] {
        let s = presets::load(name).unwrap();
        for h in [s.pair.h_prime(), s.pair.h_double_prime()] {
            let map = KickedMap::new(h, s.tau, s.hbar, &s.grid).unwrap();
            let mut psi = GridWavefunction::from_component(&s.state.components()[0], &s.grid, s.hbar).unwrap();
            let before = psi.norm_sqr();
            for _ in 0..1000 {
                map.apply(&mut psi).unwrap();
            }
            drift = drift.max((psi.norm_sqr() - before).abs());
        }
    }

    let mut worst_exact: f64 = 0.0;
    for name in presets::names() {
        let s = presets::load(name).unwrap();
        let e = exact(&s, s.n_steps);
        worst_exact = worst_exact.max(e.values.iter().map(|v| v.norm()).fold(0.0, f64::max));
    }

    let mut excess: f64 = f64::NEG_INFINITY;
    for name in ["displaced_ho", "cubic_perturbation"] {
        let s = presets::load(name).unwrap();
        let state = mixture(&[(0.5, 0.0, 1.0, 0.5), (-1.0, 0.7, 1.2, 0.3), (0.2, -0.4, 0.7, 0.2)]);
        let cfg = s.config(2_000, 4);
        for f in [f0(&state, &s.pair, &cfg).unwrap(), f1_dr(&state, &s.pair, &cfg, Reference::Average).unwrap()] {
            for (v, se) in f.values.iter().zip(&f.stderr) {
                excess = excess.max(v.norm() - 1.0 - se);
            }
        }
    }
    verdict(
        drift < 1e-12 && worst_exact <= 1.0 + 1e-12 && excess <= 0.0,
        format!("norm drift per 1e3 steps {drift:.1e}; max |f_exact| - 1 = {:.1e}; max |f| - 1 - stderr (mixtures) = {excess:.3}", worst_exact - 1.0),
    )
}

fn expansion_order_scaling() -> Verdict {
    let s = presets::load("morse_like").unwrap();
    let probes = [
        (PhasePoint::one(0.3, -0.7), PhasePoint::one(0.9, 0.4)),
        (PhasePoint::one(-1.2, 0.5), PhasePoint::one(-0.3, 1.1)),
        (PhasePoint::one(2.0, 0.1), PhasePoint::one(0.6, -0.6)),
    ];
    let scales: Vec<f64> = (0..=8).map(|k| 10f64.powf(-3.0 + 0.25 * k as f64)).collect();
    let mut min_margin = f64::INFINITY;
    let mut parts = Vec::new();
    for order in 0..=2u32 {
        let mut lowest = f64::INFINITY;
        for (x, dx) in &probes {
            let r: Vec<f64> = scales
                .iter()
                .map(|&e| {
                    let d = PhasePoint::one(e * dx.q[0], e * dx.p[0]);
                    expansion_remainder(&s.pair, x, &d, order).unwrap().abs()
                })
                .collect();
            lowest = lowest.min(log_log_fit(&scales, &r));
        }
        min_margin = min_margin.min(lowest - (order as f64 + 0.9));
        parts.push(format!("order {order}: {lowest:.3}"));
    }
    verdict(min_margin >= 0.0, format!("smallest slope on [1e-3, 1e-1]: {}", parts.join(", ")))
}

fn mc_convergence() -> Verdict {
    let s = presets::load("displaced_ho").unwrap();
    let ns = [1_000usize, 10_000, 100_000];
    let mean_se: Vec<f64> = ns
        .iter()
        .map(|&n| {
            let f = f1_dr(&s.state, &s.pair, &s.config(n, 21), Reference::Average).unwrap();
            f.stderr[1..].iter().sum::<f64>() / (f.stderr.len() - 1) as f64
        })
        .collect();
    let slope = log_log_fit(&ns.map(|n| n as f64), &mean_se);

    let step = (PI / s.tau).round() as usize;
    let pilot = 10_000;
    let needed: Vec<f64> = [1usize, 2, 4, 8]
        .iter()
        .map(|&d| {
            let p = displaced_ho_product(d).unwrap();
            let mut cfg = p.config(pilot, 31);
            cfg.n_steps = step;
            let f = f1_dr(&p.state, &p.pair, &cfg, Reference::Average).unwrap();
            let sigma = f.stderr[step] * (pilot as f64).sqrt();
            (sigma / 0.01).powi(2)
        })
        .collect();
    let ratio = needed.iter().cloned().fold(0.0, f64::max) / needed.iter().cloned().fold(f64::INFINITY, f64::min);
    verdict(
        (slope + 0.5).abs() <= 0.05 && ratio < 2.0,
        format!(
            "stderr slope {slope:.3}; paths for stderr 0.01 at t = {:.2}, D = 1,2,4,8: {:.0}, {:.0}, {:.0}, {:.0} (max/min {ratio:.2})",
            step as f64 * s.tau,
            needed[0],
            needed[1],
            needed[2],
            needed[3]
        ),
    )
}

fn kicked_rotor_smoke() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let cfg = RunConfig::from_toml(
        "scenario = \"kicked_rotor\"\nestimators = [\"exact\", \"f0\", \"f1\", \"f2_mc\"]\nn_traj = 10000\nseed = 5\n",
    )
    .unwrap();
    let report = run(&cfg, dir.path()).map_err(|e| e.to_string())?;
    let finite = report
        .series
        .iter()
        .all(|s| s.n_steps() == 50 && s.values.iter().all(|v| v.re.is_finite() && v.im.is_finite()) && s.stderr.iter().all(|e| e.is_finite()));
    let f1 = report.series(loschmidt_cli::EstimatorName::F1).unwrap();
    let bounded = f1.values.iter().zip(&f1.stderr).all(|(v, se)| v.norm() <= 1.0 + se);
    let report_ok = dir.path().join("comparison.csv").exists() && report.comparisons.len() == 3;

    // The Gaussian chain needs quadratic potentials; a kicked rotor is rejected up front.
    let chain_cfg = RunConfig::from_toml("scenario = \"kicked_rotor\"\nestimators = [\"f2_gaussian\"]\n").unwrap();
    let chain_rejected = matches!(run(&chain_cfg, dir.path()), Err(CliError::Config(_)));

    let summary: Vec<String> = report
        .comparisons
        .iter()
        .map(|c| format!("{} {:.3e}", c.estimator, c.max_deviation))
        .collect();
    let ess = report
        .series(loschmidt_cli::EstimatorName::F2Mc)
        .and_then(|s| s.meta.min_ess)
        .unwrap_or(f64::NAN);
    verdict(
        finite && bounded && report_ok && chain_rejected,
        format!(
            "finite {finite}, |f1| <= 1 + stderr {bounded}, comparison report {report_ok}; max deviation {}; f2_mc min ESS {ess:.0}; chain rejected as inapplicable {chain_rejected}",
            summary.join(", ")
        ),
    )
}

fn spectra_checks() -> Verdict {
    let mut worst_bins: f64 = 0.0;
    for omega in [0.7, -1.3, 2.2] {
        let times: Vec<f64> = (0..=256).map(|k| k as f64 * 0.05).collect();
        let values = times.iter().map(|&t| Complex64::new(0.0, -omega * t).exp()).collect();
        let series = FidelitySeries::new(times, values, vec![0.0; 257], SeriesMeta::default()).unwrap();
        let sp = spectrum(&series, 5.0).unwrap();
        worst_bins = worst_bins.max((sp.peak_frequency() - omega).abs() / sp.resolution());
    }

    let s = presets::load("displaced_ho").unwrap();
    let e = exact(&s, 1008);
    let sp = spectrum(&e, 10.0).unwrap();
    let peaks = sp.local_maxima(0.02);
    let freqs: Vec<f64> = peaks.iter().map(|&i| sp.frequencies[i]).collect();
    let spacing_err = freqs
        .windows(2)
        .map(|w| ((w[1] - w[0]) - 1.0).abs() / sp.resolution())
        .fold(0.0, f64::max);
    verdict(
        worst_bins <= 1.0 && freqs.len() >= 3 && spacing_err <= 1.0,
        format!(
            "shift-theorem peak error {worst_bins:.2} bins; displaced_ho peaks at {:?}, spacing error {spacing_err:.2} bins (bin {:.4})",
            freqs.iter().map(|f| (f * 1e3).round() / 1e3).collect::<Vec<_>>(),
            sp.resolution()
        ),
    )
}

fn main() {
    let mut band = DrBand { max_band: f64::NAN };
    let mut failures = 0;
    let mut record = |id: u32, name: &str, f: &mut dyn FnMut() -> Verdict| {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(d) => println!("PASS  {id:>2} {name}: {d} [{secs:.1}s]"),
            Err(d) => {
                failures += 1;
                println!("FAIL  {id:>2} {name}: {d} [{secs:.1}s]");
            }
        }
    };

    record(1, "dephasing representation exact on displaced oscillators", &mut || dr_exactness(&mut band));
    record(2, "dephasing representation with H' reference is not exact", &mut || dr_reference_failure(&band));
    record(3, "static average exact for a linear gradient", &mut zeroth_order_exactness);
    record(4, "second-order estimator exact for different force constants", &mut second_order_exactness);
    record(5, "second-order estimator reduces to the dephasing representation", &mut dr_f2_degeneracy);
    record(6, "normalization and zero perturbation", &mut normalization_and_trivial_limits);
    record(7, "short-time slope", &mut short_time_slope);
    record(8, "unitarity and bounds", &mut unitarity_and_bounds);
    record(9, "expansion-order scaling", &mut expansion_order_scaling);
    record(10, "Monte Carlo convergence", &mut mc_convergence);
    record(11, "kicked rotor smoke test", &mut kicked_rotor_smoke);
    record(12, "spectra", &mut spectra_checks);

    println!("acceptance: {} of 12 criteria passed", 12 - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}

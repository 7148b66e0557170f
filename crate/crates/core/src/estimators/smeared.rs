//! Second-order estimator with smeared momentum updates.
//!
//! With `ΔH = ΔV(q)` in one dimension, each momentum update `p_{n-1} → p_n` is weighted by
//!
//! ```text
//! δ̃ = h⁻¹ √(π/(i a_n)) exp(i b_n²/(4 a_n)),
//! a_n = τ ΔV''(q_n)/(8ħ),   b_n = (p_n - p_{n-1} + τ V'(q_n))/ħ
//! ```
//!
//! which integrates to one over `p_n` and tends to the classical delta as `a_n → 0`.
//! Paths accumulate `Φ_n = τ Σ_{k=1..n} ΔV(q_k)`. `p_n` only enters `δ̃_n`, so `f(nτ)`
//! uses the path weight through step `n - 1`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::static_avg::check_dims;
use super::{run_ensemble, EstimatorConfig, ErrorModel, F2Contour, FidelitySeries, SeriesMeta};
use crate::dynamics::ESCAPE_BOUND;
use crate::error::{Error, Result};
use crate::hamiltonians::HamiltonianPair;
use crate::states::{path_rng, InitialState};

/// Effective sample sizes below this fraction of `n_traj` are reported as a warning.
const ESS_WARN_FRACTION: f64 = 0.01;

pub fn f2_mc(state: &InitialState, pair: &HamiltonianPair, cfg: &EstimatorConfig) -> Result<FidelitySeries> {
    cfg.validate()?;
    check_preconditions(state, pair)?;
    let mut meta = SeriesMeta {
        estimator: "f2_mc".into(),
        n_traj: cfg.n_traj,
        seed: Some(cfg.seed),
        notes: vec![format!("contour: {:?}", cfg.f2_contour)],
        ..Default::default()
    };
    if pair.delta().is_zero() {
        return Ok(FidelitySeries::ones(cfg.tau, cfg.n_steps, meta));
    }
    let weighted = cfg.f2_contour == F2Contour::RealAxis;
    let reduced = run_ensemble(cfg, cfg.n_steps + 1, ErrorModel::BatchMeans, weighted, |i, out, w| {
        fill_path(state, pair, cfg, i, out, w)
    })?;
    if let Some(ess) = reduced.min_ess {
        if ess < ESS_WARN_FRACTION * cfg.n_traj as f64 {
            log::warn!(
                "f2_mc: effective sample size fell to {ess:.1} of {} paths; the estimate is unreliable",
                cfg.n_traj
            );
            meta.notes.push("effective sample size below 1% of paths".into());
        }
        meta.min_ess = Some(ess);
    }
    Ok(FidelitySeries::from_parts(cfg.tau, reduced.values, reduced.stderr, meta))
}

/// Per-step contributions of path `index`, exactly as summed by [`f2_mc`].
pub fn f2_path(
    state: &InitialState,
    pair: &HamiltonianPair,
    cfg: &EstimatorConfig,
    index: u64,
) -> Result<Vec<Complex64>> {
    check_preconditions(state, pair)?;
    let mut out = vec![Complex64::new(0.0, 0.0); cfg.n_steps + 1];
    fill_path(state, pair, cfg, index, &mut out, None)?;
    Ok(out)
}

fn check_preconditions(state: &InitialState, pair: &HamiltonianPair) -> Result<()> {
    check_dims(state, pair)?;
    if pair.dims() != 1 {
        return Err(Error::Precondition(format!(
            "f2 requires one degree of freedom, got {}",
            pair.dims()
        )));
    }
    if !pair.delta().is_momentum_independent() {
        return Err(Error::Precondition(
            "f2 requires a momentum-independent perturbation".into(),
        ));
    }
    Ok(())
}

fn fill_path(
    state: &InitialState,
    pair: &HamiltonianPair,
    cfg: &EstimatorConfig,
    index: u64,
    out: &mut [Complex64],
    mut weights: Option<&mut [Complex64]>,
) -> Result<()> {
    let hbar = cfg.hbar;
    let tau = cfg.tau;
    let kinetic = &pair.average().kinetic()[0];
    let potential = &pair.average().potential()[0];
    let dkin = &pair.delta().kinetic()[0];
    let dpot = &pair.delta().potential()[0];

    let mut rng = path_rng(cfg.seed, index);
    let (mut q0, mut p0) = ([0.0], [0.0]);
    state.draw_into(&mut rng, hbar, &mut q0, &mut p0);
    let mut q = Complex64::new(q0[0], 0.0);
    let mut p = Complex64::new(p0[0], 0.0);

    let mut phi = Complex64::new(0.0, 0.0);
    let mut weight = Complex64::new(1.0, 0.0);
    out[0] = Complex64::new(1.0, 0.0);
    if let Some(w) = weights.as_deref_mut() {
        w[0] = weight;
    }
    let last = out.len() - 1;
    for step in 1..=last {
        let dt = dkin.value_c(p);
        q += kinetic.gradient_c(p) * tau;
        let dv = dpot.value_c(q);
        phi += (dt + dv) * tau;
        out[step] = weight * Complex64::new(phi.im / hbar, -phi.re / hbar).exp();
        if let Some(w) = weights.as_deref_mut() {
            w[step] = weight;
        }
        if !out[step].is_finite() {
            return Err(Error::TrajectoryEscape {
                step,
                magnitude: q.norm().max(p.norm()),
            });
        }
        if step == last {
            break;
        }

        let p_classical = p - potential.gradient_c(q) * tau;
        let a = dpot.curvature_c(q) * (tau / (8.0 * hbar));
        let abs_a = a.norm();
        p = if abs_a < cfg.degenerate_a_threshold {
            p_classical
        } else {
            match cfg.f2_contour {
                F2Contour::SteepestDescent => {
                    // Along p = p_cl + √(ia/|a|)·s the kernel is a normalized real Gaussian
                    // in s with variance 2|a|ħ².
                    let z: f64 = rng.sample(StandardNormal);
                    let rotation = (Complex64::i() * a / abs_a).sqrt();
                    p_classical + rotation * (z * hbar * (2.0 * abs_a).sqrt())
                }
                F2Contour::RealAxis => {
                    let width = (cfg.proposal_width_factor * hbar * (2.0 * abs_a).sqrt())
                        .max(hbar * (4.0 * PI * abs_a).sqrt());
                    let z: f64 = rng.sample(StandardNormal);
                    let offset = z * width;
                    let density = (-0.5 * z * z).exp() / ((2.0 * PI).sqrt() * width);
                    let b = offset / hbar;
                    let kernel = (Complex64::new(PI, 0.0) / (Complex64::i() * a)).sqrt()
                        * (Complex64::i() * (b * b) / (a * 4.0)).exp()
                        / crate::planck(hbar);
                    weight *= kernel / density;
                    p_classical + offset
                }
            }
        };
        let magnitude = q.norm().max(p.norm());
        if !(magnitude <= ESCAPE_BOUND) {
            return Err(Error::TrajectoryEscape { step, magnitude });
        }
    }
    Ok(())
}

use num_complex::Complex64;

use super::static_avg::check_dims;
use super::{phase_factor, run_ensemble, EstimatorConfig, ErrorModel, FidelitySeries, Reference, SeriesMeta};
use crate::dynamics::{map_step_in_place, ESCAPE_BOUND};
use crate::error::{Error, Result};
use crate::hamiltonians::{HamiltonianPair, SeparableHamiltonian};
use crate::states::{path_rng, InitialState};

/// First order (dephasing representation): phases `Φ_n = τ Σ_{j<n} ΔH(q_{j+1}, p_j)`
/// accumulated along trajectories of the reference map, `f¹(nτ) = ⟨exp(-iΦ_n/ħ)⟩`.
pub fn f1_dr(
    state: &InitialState,
    pair: &HamiltonianPair,
    cfg: &EstimatorConfig,
    reference: Reference,
) -> Result<FidelitySeries> {
    cfg.validate()?;
    check_dims(state, pair)?;
    let meta = SeriesMeta {
        estimator: "f1".into(),
        n_traj: cfg.n_traj,
        seed: Some(cfg.seed),
        notes: vec![format!("reference: {reference:?}")],
        ..Default::default()
    };
    if pair.delta().is_zero() {
        return Ok(FidelitySeries::ones(cfg.tau, cfg.n_steps, meta));
    }
    let reduced = run_ensemble(cfg, cfg.n_steps + 1, ErrorModel::Sample, false, |i, out, _| {
        fill_path(state, pair, cfg, reference, i, out)
    })?;
    Ok(FidelitySeries::from_parts(cfg.tau, reduced.values, reduced.stderr, meta))
}

/// Per-step contributions `exp(-iΦ_n/ħ)` of path `index`, exactly as summed by [`f1_dr`].
pub fn f1_path(
    state: &InitialState,
    pair: &HamiltonianPair,
    cfg: &EstimatorConfig,
    reference: Reference,
    index: u64,
) -> Result<Vec<Complex64>> {
    check_dims(state, pair)?;
    let mut out = vec![Complex64::new(0.0, 0.0); cfg.n_steps + 1];
    fill_path(state, pair, cfg, reference, index, &mut out)?;
    Ok(out)
}

pub(crate) fn reference_hamiltonian(pair: &HamiltonianPair, reference: Reference) -> &SeparableHamiltonian {
    match reference {
        Reference::Average => pair.average(),
        Reference::HPrime => pair.h_prime(),
    }
}

fn fill_path(
    state: &InitialState,
    pair: &HamiltonianPair,
    cfg: &EstimatorConfig,
    reference: Reference,
    index: u64,
    out: &mut [Complex64],
) -> Result<()> {
    let dims = state.dims();
    let h = reference_hamiltonian(pair, reference);
    let delta = pair.delta();
    let mut q = vec![0.0; dims];
    let mut p = vec![0.0; dims];
    state.draw_into(&mut path_rng(cfg.seed, index), cfg.hbar, &mut q, &mut p);

    out[0] = Complex64::new(1.0, 0.0);
    let mut phi = 0.0;
    for step in 1..out.len() {
        let dt = delta.kinetic_energy(&p);
        map_step_in_place(&mut q, &mut p, h, cfg.tau);
        let dv = delta.potential_energy(&q);
        phi += cfg.tau * (dt + dv);
        let magnitude = q.iter().chain(&p).fold(0.0f64, |m, x| m.max(x.abs()));
        if !(magnitude <= ESCAPE_BOUND) {
            return Err(Error::TrajectoryEscape { step, magnitude });
        }
        out[step] = phase_factor(phi, cfg.hbar);
    }
    Ok(())
}

use num_complex::Complex64;

use super::{phase_factor, run_ensemble, EstimatorConfig, ErrorModel, FidelitySeries, SeriesMeta};
use crate::error::{Error, Result};
use crate::hamiltonians::HamiltonianPair;
use crate::states::{path_rng, InitialState};

/// Zeroth order: `f⁰(t) = ⟨exp(-itΔH(x₀)/ħ)⟩` over the initial Wigner density.
pub fn f0(state: &InitialState, pair: &HamiltonianPair, cfg: &EstimatorConfig) -> Result<FidelitySeries> {
    cfg.validate()?;
    check_dims(state, pair)?;
    let meta = SeriesMeta {
        estimator: "f0".into(),
        n_traj: cfg.n_traj,
        seed: Some(cfg.seed),
        ..Default::default()
    };
    if pair.delta().is_zero() {
        return Ok(FidelitySeries::ones(cfg.tau, cfg.n_steps, meta));
    }
    let dims = state.dims();
    let delta = pair.delta();
    let reduced = run_ensemble(cfg, cfg.n_steps + 1, ErrorModel::Sample, false, |i, out: &mut [Complex64], _| {
        let mut q = vec![0.0; dims];
        let mut p = vec![0.0; dims];
        state.draw_into(&mut path_rng(cfg.seed, i), cfg.hbar, &mut q, &mut p);
        let energy = delta.value_split(&q, &p);
        for (n, c) in out.iter_mut().enumerate() {
            *c = phase_factor(n as f64 * cfg.tau * energy, cfg.hbar);
        }
        Ok(())
    })?;
    Ok(FidelitySeries::from_parts(cfg.tau, reduced.values, reduced.stderr, meta))
}

pub(crate) fn check_dims(state: &InitialState, pair: &HamiltonianPair) -> Result<()> {
    if state.dims() != pair.dims() {
        return Err(Error::DimensionMismatch {
            expected: pair.dims(),
            got: state.dims(),
        });
    }
    Ok(())
}

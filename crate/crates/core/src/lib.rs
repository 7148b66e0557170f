//! Fidelity amplitude (Loschmidt echo amplitude) of perturbed kicked quantum maps.
//!
//! For a pair of separable Hamiltonians `H' = T'(p) + V'(q)` and `H'' = T''(p) + V''(q)`
//! the crate computes
//!
//! ```text
//! f(nτ) = Tr[(U'')^n ρ (U')^{-n}],    U = exp(-iτV/ħ) exp(-iτT/ħ)
//! ```
//!
//! in four ways:
//!
//! - [`qgrid::fidelity_exact`]: exact propagation of the wavefunction on a periodic
//!   position grid (the reference oracle).
//! - [`estimators::f0`]: static phase average `<exp(-itΔH(x)/ħ)>` over the Wigner density.
//! - [`estimators::f1_dr`]: dephasing representation, phases accumulated along
//!   trajectories of the average Hamiltonian's symplectic map.
//! - [`estimators::f2_mc`] / [`estimators::f2_gaussian_chain`]: second-order estimator
//!   in which momentum updates are smeared by a complex Gaussian kernel.
//!
//! [`presets`] encodes the worked systems (displaced oscillators, different force
//! constants, cubic perturbation, kicked rotor, ...) together with the order at which
//! each estimator is expected to become exact.

#![forbid(unsafe_code)]

pub mod dynamics;
pub mod error;
pub mod estimators;
pub mod hamiltonians;
pub mod phase_space;
pub mod presets;
pub mod qgrid;
pub mod spectra;
pub mod states;

pub use error::{Error, Result};
pub use estimators::{EstimatorConfig, F2Contour, FidelitySeries, Reference, SeriesMeta};
pub use hamiltonians::{make_pair, HamiltonianPair, Profile, SeparableHamiltonian};
pub use phase_space::PhasePoint;
pub use states::{GaussianComponent, InitialState};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Planck's constant `h = 2πħ`.
#[inline]
pub fn planck(hbar: f64) -> f64 {
    2.0 * std::f64::consts::PI * hbar
}

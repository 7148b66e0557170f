//! Named scenarios: the worked systems with their predicted exactness per estimator.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::{EstimatorConfig, F2Contour, Reference};
use crate::hamiltonians::{make_pair, HamiltonianPair, Profile, SeparableHamiltonian};
use crate::qgrid::{Axis, Grid};
use crate::states::InitialState;

pub const NAMES: [&str; 6] = [
    "linear_gradient",
    "displaced_ho",
    "ho_diff_k",
    "cubic_perturbation",
    "kicked_rotor",
    "morse_like",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Exactness {
    Exact,
    Approximate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    pub description: String,
    pub pair: HamiltonianPair,
    pub state: InitialState,
    pub tau: f64,
    pub n_steps: usize,
    pub hbar: f64,
    pub grid: Grid,
    /// Predicted status for `f0`, `f1` (average reference) and `f2`.
    pub exactness: BTreeMap<String, Exactness>,
    pub f2_contour: F2Contour,
}

impl Scenario {
    pub fn is_exact(&self, estimator: &str) -> bool {
        self.exactness.get(estimator) == Some(&Exactness::Exact)
    }

    /// Estimator settings with this scenario's time grid, `ħ` and contour.
    pub fn config(&self, n_traj: usize, seed: u64) -> EstimatorConfig {
        EstimatorConfig {
            n_traj,
            seed,
            tau: self.tau,
            n_steps: self.n_steps,
            hbar: self.hbar,
            f2_contour: self.f2_contour,
            ..Default::default()
        }
    }

    pub fn default_reference(&self) -> Reference {
        Reference::Average
    }
}

pub fn names() -> &'static [&'static str] {
    &NAMES
}

pub fn load(name: &str) -> Result<Scenario> {
    match name {
        "linear_gradient" => linear_gradient(),
        "displaced_ho" => displaced_ho(),
        "ho_diff_k" => ho_diff_k(),
        "cubic_perturbation" => cubic_perturbation(),
        "kicked_rotor" => kicked_rotor(),
        "morse_like" => morse_like(),
        other => Err(Error::UnknownScenario(other.to_string())),
    }
}

fn exactness(f0: Exactness, f1: Exactness, f2: Exactness) -> BTreeMap<String, Exactness> {
    [("f0", f0), ("f1", f1), ("f2", f2)]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect()
}

fn continuous(
    name: &str,
    description: &str,
    pair: HamiltonianPair,
    state: InitialState,
    exact: BTreeMap<String, Exactness>,
) -> Result<Scenario> {
    Ok(Scenario {
        name: name.into(),
        description: description.into(),
        pair,
        state,
        tau: 0.05,
        n_steps: 252,
        hbar: 1.0,
        grid: Grid::line(-20.0, 20.0, 4096)?,
        exactness: exact,
        f2_contour: F2Contour::SteepestDescent,
    })
}

fn one_dim(potential: Profile) -> Result<SeparableHamiltonian> {
    SeparableHamiltonian::one_dim(1.0, potential)
}

fn unit_gaussian(q: f64) -> Result<InitialState> {
    InitialState::gaussian(vec![q], vec![0.0], vec![1.0])
}

use Exactness::{Approximate, Exact};

fn linear_gradient() -> Result<Scenario> {
    let delta_beta = 1.0;
    let h = |beta: f64| SeparableHamiltonian::new(vec![Profile::zero()], vec![Profile::polynomial(&[0.0, beta])?]);
    continuous(
        "linear_gradient",
        "No kinetic energy, potentials ∓Δβ·q/2 (Δβ = 1): constant average, linear perturbation",
        make_pair(h(-0.5 * delta_beta)?, h(0.5 * delta_beta)?)?,
        unit_gaussian(0.0)?,
        exactness(Exact, Exact, Exact),
    )
}

fn displaced_ho() -> Result<Scenario> {
    continuous(
        "displaced_ho",
        "Oscillators (m = k = 1) centered at ±1/2; initial ground state of H'",
        make_pair(
            one_dim(Profile::harmonic(1.0, 0.5, 0.0))?,
            one_dim(Profile::harmonic(1.0, -0.5, 0.0))?,
        )?,
        unit_gaussian(0.5)?,
        exactness(Approximate, Exact, Exact),
    )
}

fn ho_diff_k() -> Result<Scenario> {
    continuous(
        "ho_diff_k",
        "Oscillators with force constants 1 and 1.21; initial ground state of H'",
        make_pair(
            one_dim(Profile::harmonic(1.0, 0.0, 0.0))?,
            one_dim(Profile::harmonic(1.21, 0.0, 0.0))?,
        )?,
        unit_gaussian(0.0)?,
        exactness(Approximate, Approximate, Exact),
    )
}

fn cubic_perturbation() -> Result<Scenario> {
    let dphi = 0.05;
    continuous(
        "cubic_perturbation",
        "Harmonic well with cubic terms ∓Δφ·q³/2 (Δφ = 0.05): perturbation Δφ·q³",
        make_pair(
            one_dim(Profile::polynomial(&[0.0, 0.0, 0.5, -0.5 * dphi])?)?,
            one_dim(Profile::polynomial(&[0.0, 0.0, 0.5, 0.5 * dphi])?)?,
        )?,
        unit_gaussian(0.0)?,
        exactness(Approximate, Approximate, Exact),
    )
}

fn kicked_rotor() -> Result<Scenario> {
    let k = 5.0;
    let dk = 0.01 * k;
    let rotor = |kick: f64| one_dim(Profile::cosine(kick));
    Ok(Scenario {
        name: "kicked_rotor".into(),
        description: "Kicked rotor T = p²/2, V = K cos q with K = 5 ∓ ΔK/2 (ΔK = 0.05), τ = 1".into(),
        pair: make_pair(rotor(k - 0.5 * dk)?, rotor(k + 0.5 * dk)?)?,
        state: unit_gaussian(PI)?,
        tau: 1.0,
        n_steps: 50,
        hbar: 1.0,
        grid: Grid::new(vec![Axis::periodic(0.0, 2.0 * PI, 1024)?])?,
        exactness: exactness(Approximate, Approximate, Approximate),
        // Complexified chaotic paths overflow within a few kicks.
        f2_contour: F2Contour::RealAxis,
    })
}

/// Coefficients of `p(x - shift)` for `p` given by ascending coefficients.
fn shifted(coeffs: &[f64], shift: f64) -> Vec<f64> {
    let mut out = vec![0.0; coeffs.len()];
    for (n, &c) in coeffs.iter().enumerate() {
        let mut binom = 1.0;
        for k in 0..=n {
            // term c · C(n,k) · x^k · (-shift)^(n-k)
            out[k] += c * binom * (-shift).powi((n - k) as i32);
            binom = binom * (n - k) as f64 / (k + 1) as f64;
        }
    }
    out
}

/// Quartic truncation of a Morse well, `D[α²x² - α³x³ + (7/12)α⁴x⁴]`.
pub fn morse_quartic(depth: f64, alpha: f64) -> Vec<f64> {
    vec![
        0.0,
        0.0,
        depth * alpha.powi(2),
        -depth * alpha.powi(3),
        depth * 7.0 / 12.0 * alpha.powi(4),
    ]
}

fn morse_like() -> Result<Scenario> {
    let well = morse_quartic(8.0, 0.35);
    let mut excited = shifted(&well, 0.3);
    excited[0] += 0.2;
    continuous(
        "morse_like",
        "Quartic Morse-like wells (D = 8, α = 0.35); H'' displaced by 0.3 and raised by 0.2",
        make_pair(one_dim(Profile::polynomial(&well)?)?, one_dim(Profile::polynomial(&excited)?)?)?,
        unit_gaussian(0.0)?,
        exactness(Approximate, Approximate, Approximate),
    )
}

/// Product of `dims` independent displaced oscillators (each as in `displaced_ho`), for
/// convergence studies across dimension. Not grid-propagated beyond two dimensions.
pub fn displaced_ho_product(dims: usize) -> Result<Scenario> {
    if dims == 0 {
        return Err(Error::InvalidParameter("dimension must be at least 1".into()));
    }
    let h = |c: f64| SeparableHamiltonian::standard(1.0, vec![Profile::harmonic(1.0, c, 0.0); dims]);
    let pair = make_pair(h(0.5)?, h(-0.5)?)?;
    let state = InitialState::gaussian(vec![0.5; dims], vec![0.0; dims], vec![1.0; dims])?;
    let axes = (0..dims.min(2))
        .map(|_| Axis::new(-12.0, 12.0, 256))
        .collect::<Result<Vec<_>>>()?;
    Ok(Scenario {
        name: format!("displaced_ho_x{dims}"),
        description: format!("{dims} independent displaced oscillators"),
        pair,
        state,
        tau: 0.05,
        n_steps: 252,
        hbar: 1.0,
        grid: Grid::new(axes)?,
        exactness: exactness(Approximate, Exact, Exact),
        f2_contour: F2Contour::SteepestDescent,
    })
}

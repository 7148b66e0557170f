//! Initial states: finite mixtures of Gaussian wavepackets.
//!
//! A component with center `(q̄, p̄)` and width `σ` has wavefunction
//! `ψ(q) = (πσ²)^{-1/4} exp[-(q - q̄)²/2σ² + i p̄ (q - q̄)/ħ]` per coordinate, and Wigner
//! function (transform `∫dξ ⟨q - ξ/2|ρ|q + ξ/2⟩ e^{ipξ/ħ}`)
//! `ρ_W = 2^D exp[-Σ_d (q_d - q̄_d)²/σ_d² + (p_d - p̄_d)² σ_d²/ħ²]`, normalized so that
//! `h^{-D} ∫ ρ_W d^{2D}x = 1`.
//!
//! Sampling uses one ChaCha stream per sample index, so any partition of the index range
//! over workers reproduces the same points.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phase_space::PhasePoint;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianComponent {
    pub center_q: Vec<f64>,
    pub center_p: Vec<f64>,
    /// Position-space width `σ` per coordinate (`|ψ|²` has variance `σ²/2`).
    pub width: Vec<f64>,
    pub weight: f64,
}

impl GaussianComponent {
    pub fn new(center_q: Vec<f64>, center_p: Vec<f64>, width: Vec<f64>, weight: f64) -> Result<Self> {
        let dims = center_q.len();
        if dims == 0 {
            return Err(Error::InvalidParameter("component has no coordinates".into()));
        }
        for len in [center_p.len(), width.len()] {
            if len != dims {
                return Err(Error::DimensionMismatch { expected: dims, got: len });
            }
        }
        if width.iter().any(|&s| !(s > 0.0) || !s.is_finite()) {
            return Err(Error::InvalidParameter("widths must be positive".into()));
        }
        if !(weight > 0.0 && weight <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "component weight must lie in (0, 1], got {weight}"
            )));
        }
        Ok(Self {
            center_q,
            center_p,
            width,
            weight,
        })
    }

    pub fn dims(&self) -> usize {
        self.center_q.len()
    }

    /// Single-coordinate factor of the wavefunction.
    pub fn wavefunction_1d(&self, d: usize, q: f64, hbar: f64) -> Complex64 {
        let s = self.width[d];
        let dq = q - self.center_q[d];
        let norm = (std::f64::consts::PI * s * s).powf(-0.25);
        let envelope = norm * (-dq * dq / (2.0 * s * s)).exp();
        Complex64::from_polar(envelope, self.center_p[d] * dq / hbar)
    }

    /// Wigner function of this (pure) component, without the mixture weight.
    pub fn wigner(&self, x: &PhasePoint, hbar: f64) -> f64 {
        let mut expo = 0.0;
        for d in 0..self.dims() {
            let s = self.width[d];
            let dq = x.q[d] - self.center_q[d];
            let dp = x.p[d] - self.center_p[d];
            expo += dq * dq / (s * s) + dp * dp * s * s / (hbar * hbar);
        }
        2f64.powi(self.dims() as i32) * (-expo).exp()
    }
}

/// Convex mixture of Gaussian components.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitialState {
    components: Vec<GaussianComponent>,
}

impl InitialState {
    pub fn new(components: Vec<GaussianComponent>) -> Result<Self> {
        let first = components
            .first()
            .ok_or_else(|| Error::InvalidParameter("a state needs at least one component".into()))?;
        let dims = first.dims();
        for c in &components {
            if c.dims() != dims {
                return Err(Error::DimensionMismatch { expected: dims, got: c.dims() });
            }
        }
        let total: f64 = components.iter().map(|c| c.weight).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "component weights must sum to 1, got {total}"
            )));
        }
        Ok(Self { components })
    }

    /// A single pure Gaussian wavepacket.
    pub fn gaussian(center_q: Vec<f64>, center_p: Vec<f64>, width: Vec<f64>) -> Result<Self> {
        Self::new(vec![GaussianComponent::new(center_q, center_p, width, 1.0)?])
    }

    pub fn components(&self) -> &[GaussianComponent] {
        &self.components
    }

    pub fn dims(&self) -> usize {
        self.components[0].dims()
    }

    pub fn is_pure_gaussian(&self) -> bool {
        self.components.len() == 1
    }

    /// Draw one phase-space point for sample `index` into `q`, `p`, continuing to use
    /// `rng` afterwards is allowed (the f² estimator draws its momentum noise from the
    /// same per-path stream).
    pub(crate) fn draw_into(&self, rng: &mut ChaCha8Rng, hbar: f64, q: &mut [f64], p: &mut [f64]) {
        let component = if self.components.len() == 1 {
            &self.components[0]
        } else {
            let u: f64 = rng.random();
            let mut acc = 0.0;
            let mut chosen = self.components.last().unwrap();
            for c in &self.components {
                acc += c.weight;
                if u < acc {
                    chosen = c;
                    break;
                }
            }
            chosen
        };
        for d in 0..component.dims() {
            let s = component.width[d];
            let zq: f64 = rng.sample(StandardNormal);
            let zp: f64 = rng.sample(StandardNormal);
            q[d] = component.center_q[d] + zq * s * std::f64::consts::FRAC_1_SQRT_2;
            p[d] = component.center_p[d] + zp * hbar / s * std::f64::consts::FRAC_1_SQRT_2;
        }
    }
}

/// Random stream for sample `index` under `seed`.
pub fn path_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// `ρ_W(x) = Σ_i w_i ρ_W,i(x)`.
pub fn wigner_density(state: &InitialState, x: &PhasePoint, hbar: f64) -> Result<f64> {
    x.check_dims(state.dims())?;
    Ok(state
        .components
        .iter()
        .map(|c| c.weight * c.wigner(x, hbar))
        .sum())
}

/// Point number `index` of the sample sequence for `seed`.
pub fn sample_point(state: &InitialState, seed: u64, index: u64, hbar: f64) -> PhasePoint {
    let dims = state.dims();
    let mut x = PhasePoint {
        q: vec![0.0; dims],
        p: vec![0.0; dims],
    };
    let mut rng = path_rng(seed, index);
    state.draw_into(&mut rng, hbar, &mut x.q, &mut x.p);
    x
}

/// `n` i.i.d. draws from the normalized Wigner density.
pub fn sample(state: &InitialState, n: usize, seed: u64, hbar: f64) -> Result<Vec<PhasePoint>> {
    if n == 0 {
        return Err(Error::InvalidParameter("sample count must be at least 1".into()));
    }
    Ok((0..n as u64)
        .map(|i| sample_point(state, seed, i, hbar))
        .collect())
}

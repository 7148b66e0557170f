//! Classical symplectic map of a separable Hamiltonian:
//!
//! ```text
//! q_n = q_{n-1} + τ ∂T/∂p(p_{n-1})
//! p_n = p_{n-1} - τ ∂V/∂q(q_n)
//! ```
//!
//! Drift first with the old momentum, then kick at the new position. This is the
//! classical counterpart of `U = exp(-iτV/ħ) exp(-iτT/ħ)` and is kept in that order.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonians::SeparableHamiltonian;
use crate::phase_space::PhasePoint;

/// Coordinates beyond this magnitude abort propagation.
pub const ESCAPE_BOUND: f64 = 1e12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub points: Vec<PhasePoint>,
    pub tau: f64,
    pub hamiltonian: String,
}

impl Trajectory {
    pub fn n_steps(&self) -> usize {
        self.points.len() - 1
    }
}

#[inline]
pub fn map_step_in_place(q: &mut [f64], p: &mut [f64], h: &SeparableHamiltonian, tau: f64) {
    let (kinetic, potential) = (h.kinetic(), h.potential());
    for d in 0..q.len() {
        q[d] += tau * kinetic[d].gradient(p[d]);
        p[d] -= tau * potential[d].gradient(q[d]);
    }
}

pub fn map_step(x: &PhasePoint, h: &SeparableHamiltonian, tau: f64) -> PhasePoint {
    let mut out = x.clone();
    map_step_in_place(&mut out.q, &mut out.p, h, tau);
    out
}

/// `x_0, ..., x_N` under the map of `h`.
pub fn trajectory(
    x0: &PhasePoint,
    h: &SeparableHamiltonian,
    n_steps: usize,
    tau: f64,
    tag: impl Into<String>,
) -> Result<Trajectory> {
    x0.check_dims(h.dims())?;
    let mut points = Vec::with_capacity(n_steps + 1);
    points.push(x0.clone());
    let mut x = x0.clone();
    for step in 1..=n_steps {
        map_step_in_place(&mut x.q, &mut x.p, h, tau);
        let magnitude = x.max_abs();
        if !(magnitude <= ESCAPE_BOUND) {
            return Err(Error::TrajectoryEscape { step, magnitude });
        }
        points.push(x.clone());
    }
    Ok(Trajectory {
        points,
        tau,
        hamiltonian: tag.into(),
    })
}

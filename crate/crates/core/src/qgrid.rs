//! Exact propagation of the kicked map `U = exp(-iτV/ħ) exp(-iτT/ħ)` on a uniform
//! periodic position grid, and the exact fidelity amplitude built from it.
//!
//! The kinetic factor is applied in the discrete momentum basis (`p_k = 2πħk/L`), so on
//! the grid the map is realized without any splitting error. Probability that reaches the
//! outer 5% of the position box or of the momentum range is reported as aliasing.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::{FidelitySeries, SeriesMeta};
use crate::hamiltonians::{HamiltonianPair, SeparableHamiltonian};
use crate::states::{GaussianComponent, InitialState};

/// Fraction of an axis, at each end, watched by the leak monitor.
const EDGE_FRACTION: f64 = 0.05;
/// Largest probability tolerated in a watched edge region.
pub const LEAK_TOLERANCE: f64 = 1e-8;
/// Required clearance between a Gaussian center and the box edge, in widths.
const EXTENT_WIDTHS: f64 = 8.0;
/// Periodic images summed when wrapping a Gaussian onto a periodic domain.
const WRAP_IMAGES: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub points: usize,
    /// The physical coordinate itself is periodic (angle), not just the numerical box.
    pub periodic: bool,
}

impl Axis {
    pub fn new(min: f64, max: f64, points: usize) -> Result<Self> {
        if !(max > min) || !min.is_finite() || !max.is_finite() {
            return Err(Error::InvalidParameter(format!("invalid grid extent [{min}, {max})")));
        }
        if points < 4 || !points.is_power_of_two() {
            return Err(Error::InvalidParameter(format!(
                "grid point count must be a power of two (≥ 4), got {points}"
            )));
        }
        Ok(Self {
            min,
            max,
            points,
            periodic: false,
        })
    }

    /// An angle-like coordinate on `[min, max)`.
    pub fn periodic(min: f64, max: f64, points: usize) -> Result<Self> {
        Ok(Self {
            periodic: true,
            ..Self::new(min, max, points)?
        })
    }

    pub fn length(&self) -> f64 {
        self.max - self.min
    }

    pub fn spacing(&self) -> f64 {
        self.length() / self.points as f64
    }

    pub fn positions(&self) -> Vec<f64> {
        let dq = self.spacing();
        (0..self.points).map(|i| self.min + i as f64 * dq).collect()
    }

    /// Momenta in FFT order.
    pub fn momenta(&self, hbar: f64) -> Vec<f64> {
        let m = self.points as i64;
        let dp = crate::planck(hbar) / self.length();
        (0..m)
            .map(|j| if j < m / 2 { j } else { j - m } as f64 * dp)
            .collect()
    }

    fn edge_width(&self) -> usize {
        ((EDGE_FRACTION * self.points as f64).ceil() as usize).max(1)
    }

    fn is_position_edge(&self, i: usize) -> bool {
        let w = self.edge_width();
        i < w || i >= self.points - w
    }

    /// FFT index `j` is within the outer 5% of the momentum range.
    fn is_momentum_edge(&self, j: usize) -> bool {
        let half = self.points / 2;
        let k = if j < half { j } else { self.points - j };
        k + self.edge_width() > half
    }
}

/// Tensor-product grid in one or two dimensions (row-major, last axis fastest).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub axes: Vec<Axis>,
}

impl Grid {
    pub fn new(axes: Vec<Axis>) -> Result<Self> {
        if axes.is_empty() || axes.len() > 2 {
            return Err(Error::InvalidParameter(format!(
                "grid propagation supports 1 or 2 dimensions, got {}",
                axes.len()
            )));
        }
        Ok(Self { axes })
    }

    pub fn line(min: f64, max: f64, points: usize) -> Result<Self> {
        Self::new(vec![Axis::new(min, max, points)?])
    }

    pub fn dims(&self) -> usize {
        self.axes.len()
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.points).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cell_volume(&self) -> f64 {
        self.axes.iter().map(Axis::spacing).product()
    }

    /// Same extents with every axis refined by `factor` (a power of two).
    pub fn refined(&self, factor: usize) -> Result<Self> {
        let axes = self
            .axes
            .iter()
            .map(|a| {
                Ok(Axis {
                    points: a.points * factor,
                    ..*a
                })
            })
            .collect::<Result<Vec<_>>>()?;
        for a in &axes {
            Axis::new(a.min, a.max, a.points)?;
        }
        Self::new(axes)
    }

    fn coordinates(&self, flat: usize) -> [usize; 2] {
        match self.axes.len() {
            1 => [flat, 0],
            _ => [flat / self.axes[1].points, flat % self.axes[1].points],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridWavefunction {
    pub values: Vec<Complex64>,
    pub grid: Grid,
}

impl GridWavefunction {
    /// Samples a Gaussian component and normalizes it on the grid. Periodic axes carry the
    /// wrapped Gaussian; other axes must clear the center by 8 widths on each side.
    pub fn from_component(component: &GaussianComponent, grid: &Grid, hbar: f64) -> Result<Self> {
        if component.dims() != grid.dims() {
            return Err(Error::DimensionMismatch {
                expected: grid.dims(),
                got: component.dims(),
            });
        }
        let factors: Vec<Vec<Complex64>> = grid
            .axes
            .iter()
            .enumerate()
            .map(|(d, axis)| {
                let (c, s) = (component.center_q[d], component.width[d]);
                if !axis.periodic && (c - EXTENT_WIDTHS * s < axis.min || c + EXTENT_WIDTHS * s > axis.max) {
                    return Err(Error::Precondition(format!(
                        "grid [{}, {}) does not cover the state to {EXTENT_WIDTHS} widths around {c}",
                        axis.min, axis.max
                    )));
                }
                Ok(axis
                    .positions()
                    .into_iter()
                    .map(|q| {
                        if axis.periodic {
                            (-WRAP_IMAGES..=WRAP_IMAGES)
                                .map(|k| component.wavefunction_1d(d, q + k as f64 * axis.length(), hbar))
                                .sum()
                        } else {
                            component.wavefunction_1d(d, q, hbar)
                        }
                    })
                    .collect())
            })
            .collect::<Result<_>>()?;
        let values = (0..grid.len())
            .map(|flat| {
                let idx = grid.coordinates(flat);
                (0..grid.dims()).map(|d| factors[d][idx[d]]).product()
            })
            .collect();
        let mut psi = Self {
            values,
            grid: grid.clone(),
        };
        let norm = psi.norm_sqr().sqrt();
        psi.values.iter_mut().for_each(|v| *v /= norm);
        Ok(psi)
    }

    /// `Σ|ψ|² ΔV`.
    pub fn norm_sqr(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.cell_volume()
    }

    /// `⟨self|other⟩`.
    pub fn overlap(&self, other: &GridWavefunction) -> Complex64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.conj() * b)
            .sum::<Complex64>()
            * self.grid.cell_volume()
    }

    fn position_edge_probability(&self) -> f64 {
        let mut total = 0.0;
        for (flat, v) in self.values.iter().enumerate() {
            let idx = self.grid.coordinates(flat);
            let edge = self
                .grid
                .axes
                .iter()
                .enumerate()
                .any(|(d, a)| !a.periodic && a.is_position_edge(idx[d]));
            if edge {
                total += v.norm_sqr();
            }
        }
        total * self.grid.cell_volume()
    }
}

/// Precomputed single-step propagator of one Hamiltonian on one grid.
pub struct KickedMap {
    grid: Grid,
    potential_phase: Vec<Complex64>,
    kinetic_phase: Vec<Vec<Complex64>>,
    forward: Vec<Arc<dyn Fft<f64>>>,
    inverse: Vec<Arc<dyn Fft<f64>>>,
    identity: bool,
}

/// Edge probabilities observed during one step.
#[derive(Debug, Clone, Copy, Default)]
struct Leak {
    position: f64,
    momentum: f64,
}

impl KickedMap {
    pub fn new(h: &SeparableHamiltonian, tau: f64, hbar: f64, grid: &Grid) -> Result<Self> {
        if h.dims() != grid.dims() {
            return Err(Error::DimensionMismatch {
                expected: grid.dims(),
                got: h.dims(),
            });
        }
        let mut planner = FftPlanner::new();
        let positions: Vec<Vec<f64>> = grid.axes.iter().map(Axis::positions).collect();
        let potential_phase = (0..grid.len())
            .map(|flat| {
                let idx = grid.coordinates(flat);
                let v: f64 = (0..grid.dims()).map(|d| h.potential()[d].value(positions[d][idx[d]])).sum();
                Complex64::from_polar(1.0, -tau * v / hbar)
            })
            .collect();
        let kinetic_phase = grid
            .axes
            .iter()
            .enumerate()
            .map(|(d, a)| {
                let scale = 1.0 / a.points as f64;
                a.momenta(hbar)
                    .into_iter()
                    .map(|p| Complex64::from_polar(scale, -tau * h.kinetic()[d].value(p) / hbar))
                    .collect()
            })
            .collect();
        Ok(Self {
            grid: grid.clone(),
            potential_phase,
            kinetic_phase,
            forward: grid.axes.iter().map(|a| planner.plan_fft_forward(a.points)).collect(),
            inverse: grid.axes.iter().map(|a| planner.plan_fft_inverse(a.points)).collect(),
            identity: tau == 0.0,
        })
    }

    fn transform(&self, values: &mut [Complex64], plans: &[Arc<dyn Fft<f64>>]) {
        match self.grid.dims() {
            1 => plans[0].process(values),
            _ => {
                let (rows, cols) = (self.grid.axes[0].points, self.grid.axes[1].points);
                for row in values.chunks_exact_mut(cols) {
                    plans[1].process(row);
                }
                let mut column = vec![Complex64::new(0.0, 0.0); rows];
                for c in 0..cols {
                    for r in 0..rows {
                        column[r] = values[r * cols + c];
                    }
                    plans[0].process(&mut column);
                    for r in 0..rows {
                        values[r * cols + c] = column[r];
                    }
                }
            }
        }
    }

    fn step_monitored(&self, psi: &mut GridWavefunction) -> Leak {
        if self.identity {
            return Leak::default();
        }
        let values = &mut psi.values;
        self.transform(values, &self.forward);
        let mut total = 0.0;
        let mut edge = 0.0;
        for (flat, v) in values.iter_mut().enumerate() {
            let idx = self.grid.coordinates(flat);
            let prob = v.norm_sqr();
            total += prob;
            if self
                .grid
                .axes
                .iter()
                .enumerate()
                .any(|(d, a)| a.is_momentum_edge(idx[d]))
            {
                edge += prob;
            }
            for d in 0..self.grid.dims() {
                *v *= self.kinetic_phase[d][idx[d]];
            }
        }
        self.transform(values, &self.inverse);
        for (v, phase) in values.iter_mut().zip(&self.potential_phase) {
            *v *= phase;
        }
        Leak {
            position: psi.position_edge_probability(),
            momentum: if total > 0.0 { edge / total } else { 0.0 },
        }
    }

    pub fn apply(&self, psi: &mut GridWavefunction) -> Result<()> {
        if psi.grid != self.grid {
            return Err(Error::InvalidParameter("wavefunction and propagator grids differ".into()));
        }
        self.step_monitored(psi);
        Ok(())
    }
}

/// One application of `exp(-iτV/ħ) exp(-iτT/ħ)`.
pub fn kick_step(psi: &GridWavefunction, h: &SeparableHamiltonian, tau: f64, hbar: f64) -> Result<GridWavefunction> {
    let map = KickedMap::new(h, tau, hbar, &psi.grid)?;
    let mut out = psi.clone();
    map.apply(&mut out)?;
    Ok(out)
}

fn check_leak(leak: Leak, step: usize, branch: &'static str) -> Result<()> {
    for (region, probability) in [("position", leak.position), ("momentum", leak.momentum)] {
        if !(probability < LEAK_TOLERANCE) {
            return Err(Error::Aliasing {
                step,
                branch,
                region,
                probability,
            });
        }
    }
    Ok(())
}

/// Overlaps `⟨(U')^n ψ | (U'')^n ψ⟩` for one component, `n = 0..=N`.
fn component_series(
    component: &GaussianComponent,
    maps: (&KickedMap, &KickedMap),
    n_steps: usize,
    hbar: f64,
    grid: &Grid,
) -> Result<Vec<Complex64>> {
    let psi0 = GridWavefunction::from_component(component, grid, hbar)?;
    check_leak(
        Leak {
            position: psi0.position_edge_probability(),
            momentum: 0.0,
        },
        0,
        "initial",
    )?;
    let mut a = psi0.clone();
    let mut b = psi0;
    let mut out = Vec::with_capacity(n_steps + 1);
    out.push(Complex64::new(1.0, 0.0));
    for step in 1..=n_steps {
        let (la, lb) = rayon::join(|| maps.0.step_monitored(&mut a), || maps.1.step_monitored(&mut b));
        check_leak(la, step, "h_prime")?;
        check_leak(lb, step, "h_double_prime")?;
        out.push(a.overlap(&b));
    }
    Ok(out)
}

/// Exact `f(nτ) = Σ_i w_i ⟨(U')^n ψ_i | (U'')^n ψ_i⟩` for `n = 0..=N`.
pub fn fidelity_exact(
    state: &InitialState,
    pair: &HamiltonianPair,
    n_steps: usize,
    tau: f64,
    hbar: f64,
    grid: &Grid,
) -> Result<FidelitySeries> {
    if state.dims() != pair.dims() {
        return Err(Error::DimensionMismatch {
            expected: pair.dims(),
            got: state.dims(),
        });
    }
    if !(hbar > 0.0) || !(tau >= 0.0) {
        return Err(Error::InvalidParameter(format!("need ħ > 0 and τ ≥ 0, got ħ = {hbar}, τ = {tau}")));
    }
    let map_prime = KickedMap::new(pair.h_prime(), tau, hbar, grid)?;
    let map_double = KickedMap::new(pair.h_double_prime(), tau, hbar, grid)?;
    let per_component = state
        .components()
        .par_iter()
        .map(|c| component_series(c, (&map_prime, &map_double), n_steps, hbar, grid))
        .collect::<Result<Vec<_>>>()?;
    let mut values = vec![Complex64::new(0.0, 0.0); n_steps + 1];
    for (c, series) in state.components().iter().zip(&per_component) {
        for (v, s) in values.iter_mut().zip(series) {
            *v += c.weight * s;
        }
    }
    values[0] = Complex64::new(1.0, 0.0);
    let meta = SeriesMeta {
        estimator: "exact".into(),
        notes: vec![format!(
            "grid: {}",
            grid.axes
                .iter()
                .map(|a| format!("[{}, {}) x {}", a.min, a.max, a.points))
                .collect::<Vec<_>>()
                .join(" * ")
        )],
        ..Default::default()
    };
    Ok(FidelitySeries::from_parts(tau, values, vec![0.0; n_steps + 1], meta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonians::{make_pair, Profile};

    fn grid() -> Grid {
        Grid::line(-20.0, 20.0, 1024).unwrap()
    }

    fn unit_state() -> InitialState {
        InitialState::gaussian(vec![0.0], vec![0.0], vec![1.0]).unwrap()
    }

    #[test]
    fn rejects_bad_axes() {
        assert!(Axis::new(0.0, 1.0, 1000).is_err());
        assert!(Axis::new(1.0, 0.0, 1024).is_err());
        assert!(Grid::new(vec![Axis::new(0.0, 1.0, 8).unwrap(); 3]).is_err());
    }

    #[test]
    fn momentum_grid_in_fft_order() {
        let a = Axis::new(0.0, 2.0 * std::f64::consts::PI, 8).unwrap();
        assert_eq!(a.momenta(1.0), vec![0.0, 1.0, 2.0, 3.0, -4.0, -3.0, -2.0, -1.0]);
    }

    #[test]
    fn free_spreading_preserves_norm() {
        let h = SeparableHamiltonian::one_dim(1.0, Profile::zero()).unwrap();
        let mut psi = GridWavefunction::from_component(&unit_state().components()[0], &grid(), 1.0).unwrap();
        assert!((psi.norm_sqr() - 1.0).abs() < 1e-10);
        let map = KickedMap::new(&h, 0.1, 1.0, &grid()).unwrap();
        for _ in 0..20 {
            map.apply(&mut psi).unwrap();
        }
        assert!((psi.norm_sqr() - 1.0).abs() < 1e-12);
        // Width grows: ⟨q²⟩ = (1 + t²)/2 for σ = 1.
        let q2: f64 = grid()
            .axes[0]
            .positions()
            .iter()
            .zip(&psi.values)
            .map(|(q, v)| q * q * v.norm_sqr())
            .sum::<f64>()
            * grid().cell_volume();
        assert!((q2 - 0.5 * (1.0 + 4.0)).abs() < 1e-8);
    }

    #[test]
    fn zero_step_is_identity() {
        let h = SeparableHamiltonian::one_dim(1.0, Profile::harmonic(1.0, 0.0, 0.0)).unwrap();
        let psi = GridWavefunction::from_component(&unit_state().components()[0], &grid(), 1.0).unwrap();
        assert_eq!(kick_step(&psi, &h, 0.0, 1.0).unwrap(), psi);
    }

    #[test]
    fn identical_pair_gives_unit_fidelity() {
        let h = SeparableHamiltonian::one_dim(1.0, Profile::harmonic(1.0, 0.3, 0.0)).unwrap();
        let pair = make_pair(h.clone(), h).unwrap();
        let s = fidelity_exact(&unit_state(), &pair, 100, 0.05, 1.0, &grid()).unwrap();
        for v in &s.values {
            assert!((v - 1.0).norm() < 1e-12);
        }
    }

    #[test]
    fn linear_potential_closed_form() {
        // H' = -q/2, H'' = q/2, T = 0: f(t) = ⟨exp(-itq)⟩ = exp(-t²/4).
        let h1 = SeparableHamiltonian::new(vec![Profile::zero()], vec![Profile::polynomial(&[0.0, -0.5]).unwrap()]).unwrap();
        let h2 = SeparableHamiltonian::new(vec![Profile::zero()], vec![Profile::polynomial(&[0.0, 0.5]).unwrap()]).unwrap();
        let pair = make_pair(h1, h2).unwrap();
        let s = fidelity_exact(&unit_state(), &pair, 40, 0.1, 1.0, &grid()).unwrap();
        for (t, v) in s.times.iter().zip(&s.values) {
            assert!((v - (-t * t / 4.0).exp()).norm() < 1e-10, "t = {t}");
        }
    }

    #[test]
    fn aliasing_is_detected() {
        // A steep linear potential without kinetic energy pushes momentum past the grid's
        // Nyquist limit while the position density stays put.
        let h1 = SeparableHamiltonian::new(vec![Profile::zero()], vec![Profile::polynomial(&[0.0, 50.0]).unwrap()]).unwrap();
        let pair = make_pair(h1.clone(), h1).unwrap();
        let coarse = Grid::line(-20.0, 20.0, 128).unwrap();
        let err = fidelity_exact(&unit_state(), &pair, 100, 0.1, 1.0, &coarse).unwrap_err();
        assert!(matches!(err, Error::Aliasing { region: "momentum", .. }), "{err}");
    }

    #[test]
    fn extent_rule_enforced() {
        let state = InitialState::gaussian(vec![15.0], vec![0.0], vec![1.0]).unwrap();
        let err = GridWavefunction::from_component(&state.components()[0], &grid(), 1.0).unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));
    }

    #[test]
    fn two_dimensional_product_factorizes() {
        let h1 = SeparableHamiltonian::standard(1.0, vec![Profile::harmonic(1.0, 0.25, 0.0), Profile::harmonic(1.0, 0.0, 0.0)]).unwrap();
        let h2 = SeparableHamiltonian::standard(1.0, vec![Profile::harmonic(1.0, -0.25, 0.0), Profile::harmonic(1.2, 0.0, 0.0)]).unwrap();
        let pair2 = make_pair(h1, h2).unwrap();
        let state2 = InitialState::gaussian(vec![0.0, 0.0], vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        let g2 = Grid::new(vec![Axis::new(-12.0, 12.0, 128).unwrap(); 2]).unwrap();
        let f2 = fidelity_exact(&state2, &pair2, 30, 0.1, 1.0, &g2).unwrap();

        let g1 = Grid::line(-12.0, 12.0, 128).unwrap();
        let one = |k1: f64, c1: f64, k2: f64, c2: f64| {
            let a = SeparableHamiltonian::one_dim(1.0, Profile::harmonic(k1, c1, 0.0)).unwrap();
            let b = SeparableHamiltonian::one_dim(1.0, Profile::harmonic(k2, c2, 0.0)).unwrap();
            fidelity_exact(&unit_state(), &make_pair(a, b).unwrap(), 30, 0.1, 1.0, &g1).unwrap()
        };
        let fa = one(1.0, 0.25, 1.0, -0.25);
        let fb = one(1.0, 0.0, 1.2, 0.0);
        for n in 0..=30 {
            assert!((f2.values[n] - fa.values[n] * fb.values[n]).norm() < 1e-12);
        }
    }
}

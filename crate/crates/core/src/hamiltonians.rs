//! Separable Hamiltonians `H(q, p) = Σ_d T_d(p_d) + V_d(q_d)`, Hamiltonian pairs and the
//! `Δx` expansion of `H''(x + Δx/2) - H'(x - Δx/2)` about the average Hamiltonian.
//!
//! Every one-dimensional term is a [`Profile`]: a polynomial of degree at most four plus
//! an optional `K cos(x)` kick. Profiles are closed under linear combination, so the
//! average `(H' + H'')/2` and the perturbation `H'' - H'` are computed by exact
//! coefficient arithmetic.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phase_space::PhasePoint;

const MAX_DEGREE: usize = 4;

/// One-dimensional function `c0 + c1 x + c2 x² + c3 x³ + c4 x⁴ + K cos x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Profile {
    coeffs: [f64; MAX_DEGREE + 1],
    cos_amplitude: f64,
}

impl Default for Profile {
    fn default() -> Self {
        Self::zero()
    }
}

impl Profile {
    pub const fn zero() -> Self {
        Self {
            coeffs: [0.0; MAX_DEGREE + 1],
            cos_amplitude: 0.0,
        }
    }

    /// Polynomial with coefficients in ascending order. Trailing zeros are allowed.
    pub fn polynomial(coeffs: &[f64]) -> Result<Self> {
        let degree = coeffs
            .iter()
            .rposition(|&c| c != 0.0)
            .unwrap_or(0);
        if degree > MAX_DEGREE {
            return Err(Error::UnsupportedDegree(degree));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter(
                "polynomial coefficients must be finite".into(),
            ));
        }
        let mut out = Self::zero();
        for (k, &c) in coeffs.iter().take(MAX_DEGREE + 1).enumerate() {
            out.coeffs[k] = c;
        }
        Ok(out)
    }

    /// `p²/2m`.
    pub fn kinetic(mass: f64) -> Result<Self> {
        if !(mass > 0.0) || !mass.is_finite() {
            return Err(Error::InvalidParameter(format!("mass must be positive, got {mass}")));
        }
        Self::polynomial(&[0.0, 0.0, 0.5 / mass])
    }

    /// `k (x - center)² / 2 + offset`.
    pub fn harmonic(k: f64, center: f64, offset: f64) -> Self {
        Self {
            coeffs: [
                0.5 * k * center * center + offset,
                -k * center,
                0.5 * k,
                0.0,
                0.0,
            ],
            cos_amplitude: 0.0,
        }
    }

    /// `K cos x`.
    pub fn cosine(amplitude: f64) -> Self {
        Self {
            coeffs: [0.0; MAX_DEGREE + 1],
            cos_amplitude: amplitude,
        }
    }

    pub fn with_cosine(mut self, amplitude: f64) -> Self {
        self.cos_amplitude += amplitude;
        self
    }

    pub fn coefficients(&self) -> &[f64; MAX_DEGREE + 1] {
        &self.coeffs
    }

    pub fn cos_amplitude(&self) -> f64 {
        self.cos_amplitude
    }

    /// Degree of the polynomial part (0 for a constant or zero polynomial).
    pub fn degree(&self) -> usize {
        self.coeffs.iter().rposition(|&c| c != 0.0).unwrap_or(0)
    }

    pub fn is_polynomial(&self) -> bool {
        self.cos_amplitude == 0.0
    }

    pub fn is_zero(&self) -> bool {
        self.is_polynomial() && self.coeffs.iter().all(|&c| c == 0.0)
    }

    pub fn is_constant(&self) -> bool {
        self.is_polynomial() && self.degree() == 0
    }

    pub fn is_affine(&self) -> bool {
        self.is_polynomial() && self.degree() <= 1
    }

    pub fn is_quadratic(&self) -> bool {
        self.is_polynomial() && self.degree() <= 2
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = *self;
        out.coeffs.iter_mut().for_each(|c| *c *= s);
        out.cos_amplitude *= s;
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = *self;
        for (c, o) in out.coeffs.iter_mut().zip(other.coeffs.iter()) {
            *c += o;
        }
        out.cos_amplitude += other.cos_amplitude;
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = *self;
        for (c, o) in out.coeffs.iter_mut().zip(other.coeffs.iter()) {
            *c -= o;
        }
        out.cos_amplitude -= other.cos_amplitude;
        out
    }

    // The real and complex evaluations below share the exact same operation order, so a
    // complex argument with zero imaginary part reproduces the real result bit for bit.

    #[inline]
    pub fn value(&self, x: f64) -> f64 {
        let c = &self.coeffs;
        let poly = (((c[4] * x + c[3]) * x + c[2]) * x + c[1]) * x + c[0];
        if self.cos_amplitude != 0.0 {
            poly + self.cos_amplitude * x.cos()
        } else {
            poly
        }
    }

    #[inline]
    pub fn gradient(&self, x: f64) -> f64 {
        let c = &self.coeffs;
        let poly = ((4.0 * c[4] * x + 3.0 * c[3]) * x + 2.0 * c[2]) * x + c[1];
        if self.cos_amplitude != 0.0 {
            poly - self.cos_amplitude * x.sin()
        } else {
            poly
        }
    }

    #[inline]
    pub fn curvature(&self, x: f64) -> f64 {
        let c = &self.coeffs;
        let poly = (12.0 * c[4] * x + 6.0 * c[3]) * x + 2.0 * c[2];
        if self.cos_amplitude != 0.0 {
            poly - self.cos_amplitude * x.cos()
        } else {
            poly
        }
    }

    #[inline]
    pub fn value_c(&self, x: Complex64) -> Complex64 {
        let c = &self.coeffs;
        let poly = (((x * c[4] + c[3]) * x + c[2]) * x + c[1]) * x + c[0];
        if self.cos_amplitude != 0.0 {
            poly + x.cos() * self.cos_amplitude
        } else {
            poly
        }
    }

    #[inline]
    pub fn gradient_c(&self, x: Complex64) -> Complex64 {
        let c = &self.coeffs;
        let poly = ((x * (4.0 * c[4]) + 3.0 * c[3]) * x + 2.0 * c[2]) * x + c[1];
        if self.cos_amplitude != 0.0 {
            poly - x.sin() * self.cos_amplitude
        } else {
            poly
        }
    }

    #[inline]
    pub fn curvature_c(&self, x: Complex64) -> Complex64 {
        let c = &self.coeffs;
        let poly = (x * (12.0 * c[4]) + 6.0 * c[3]) * x + 2.0 * c[2];
        if self.cos_amplitude != 0.0 {
            poly - x.cos() * self.cos_amplitude
        } else {
            poly
        }
    }
}

/// `H(q, p) = Σ_d T_d(p_d) + V_d(q_d)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparableHamiltonian {
    kinetic: Vec<Profile>,
    potential: Vec<Profile>,
}

impl SeparableHamiltonian {
    pub fn new(kinetic: Vec<Profile>, potential: Vec<Profile>) -> Result<Self> {
        if kinetic.is_empty() {
            return Err(Error::InvalidParameter(
                "a Hamiltonian needs at least one degree of freedom".into(),
            ));
        }
        if kinetic.len() != potential.len() {
            return Err(Error::DimensionMismatch {
                expected: kinetic.len(),
                got: potential.len(),
            });
        }
        Ok(Self { kinetic, potential })
    }

    /// `p²/2m + V(q)` in one dimension.
    pub fn one_dim(mass: f64, potential: Profile) -> Result<Self> {
        Self::new(vec![Profile::kinetic(mass)?], vec![potential])
    }

    /// `Σ_d p_d²/2m + V_d(q_d)`.
    pub fn standard(mass: f64, potentials: Vec<Profile>) -> Result<Self> {
        let t = Profile::kinetic(mass)?;
        Self::new(vec![t; potentials.len()], potentials)
    }

    pub fn dims(&self) -> usize {
        self.kinetic.len()
    }

    pub fn kinetic(&self) -> &[Profile] {
        &self.kinetic
    }

    pub fn potential(&self) -> &[Profile] {
        &self.potential
    }

    pub fn kinetic_energy(&self, p: &[f64]) -> f64 {
        self.kinetic
            .iter()
            .zip(p)
            .map(|(t, &x)| t.value(x))
            .sum()
    }

    pub fn potential_energy(&self, q: &[f64]) -> f64 {
        self.potential
            .iter()
            .zip(q)
            .map(|(v, &x)| v.value(x))
            .sum()
    }

    pub fn value(&self, x: &PhasePoint) -> f64 {
        self.kinetic_energy(&x.p) + self.potential_energy(&x.q)
    }

    /// `H(q, p)` with position and momentum taken from different points, as needed for
    /// the mixed argument `H(q_{n+1}, p_n)` of the map-level phases.
    #[inline]
    pub fn value_split(&self, q: &[f64], p: &[f64]) -> f64 {
        let mut acc = 0.0;
        for d in 0..self.kinetic.len() {
            acc += self.kinetic[d].value(p[d]) + self.potential[d].value(q[d]);
        }
        acc
    }

    pub fn is_zero(&self) -> bool {
        self.kinetic.iter().chain(&self.potential).all(Profile::is_zero)
    }

    pub fn is_momentum_independent(&self) -> bool {
        self.kinetic.iter().all(Profile::is_constant)
    }

    fn combine(&self, other: &Self, f: impl Fn(&Profile, &Profile) -> Profile) -> Self {
        Self {
            kinetic: self
                .kinetic
                .iter()
                .zip(&other.kinetic)
                .map(|(a, b)| f(a, b))
                .collect(),
            potential: self
                .potential
                .iter()
                .zip(&other.potential)
                .map(|(a, b)| f(a, b))
                .collect(),
        }
    }
}

/// `(H', H'')` with the derived average `H = (H' + H'')/2` and perturbation `ΔH = H'' - H'`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianPair {
    h_prime: SeparableHamiltonian,
    h_double_prime: SeparableHamiltonian,
    average: SeparableHamiltonian,
    delta: SeparableHamiltonian,
}

pub fn make_pair(
    h_prime: SeparableHamiltonian,
    h_double_prime: SeparableHamiltonian,
) -> Result<HamiltonianPair> {
    if h_prime.dims() != h_double_prime.dims() {
        return Err(Error::DimensionMismatch {
            expected: h_prime.dims(),
            got: h_double_prime.dims(),
        });
    }
    let average = h_prime.combine(&h_double_prime, |a, b| a.add(b).scale(0.5));
    let delta = h_double_prime.combine(&h_prime, |b, a| b.sub(a));
    Ok(HamiltonianPair {
        h_prime,
        h_double_prime,
        average,
        delta,
    })
}

impl HamiltonianPair {
    pub fn h_prime(&self) -> &SeparableHamiltonian {
        &self.h_prime
    }

    pub fn h_double_prime(&self) -> &SeparableHamiltonian {
        &self.h_double_prime
    }

    pub fn average(&self) -> &SeparableHamiltonian {
        &self.average
    }

    pub fn delta(&self) -> &SeparableHamiltonian {
        &self.delta
    }

    pub fn dims(&self) -> usize {
        self.h_prime.dims()
    }

    /// `(H'', H')`: negates the perturbation, keeps the average.
    pub fn swapped(&self) -> HamiltonianPair {
        make_pair(self.h_double_prime.clone(), self.h_prime.clone())
            .expect("pair dimensions already validated")
    }
}

/// `[H''(x + Δx/2) - H'(x - Δx/2)]` minus its expansion about the average Hamiltonian
/// truncated at `order` in `Δx`:
///
/// - order 0: `ΔH(x)`
/// - order 1: `+ ∂T/∂p·Δp + ∂V/∂q·Δq` (derivatives of the average)
/// - order 2: `+ (1/8) ∂²ΔH/∂x²·(Δx)²`, per coordinate
pub fn expansion_remainder(
    pair: &HamiltonianPair,
    x: &PhasePoint,
    dx: &PhasePoint,
    order: u32,
) -> Result<f64> {
    if order > 2 {
        return Err(Error::UnsupportedOrder(order));
    }
    let dims = pair.dims();
    x.check_dims(dims)?;
    dx.check_dims(dims)?;

    let mut plus = x.clone();
    let mut minus = x.clone();
    for d in 0..dims {
        plus.q[d] += 0.5 * dx.q[d];
        plus.p[d] += 0.5 * dx.p[d];
        minus.q[d] -= 0.5 * dx.q[d];
        minus.p[d] -= 0.5 * dx.p[d];
    }
    let exact = pair.h_double_prime.value(&plus) - pair.h_prime.value(&minus);

    let mut truncated = pair.delta.value(x);
    if order >= 1 {
        for d in 0..dims {
            truncated += pair.average.kinetic[d].gradient(x.p[d]) * dx.p[d]
                + pair.average.potential[d].gradient(x.q[d]) * dx.q[d];
        }
    }
    if order >= 2 {
        for d in 0..dims {
            truncated += 0.125
                * (pair.delta.kinetic[d].curvature(x.p[d]) * dx.p[d] * dx.p[d]
                    + pair.delta.potential[d].curvature(x.q[d]) * dx.q[d] * dx.q[d]);
        }
    }
    Ok(exact - truncated)
}

/// Lowest expansion order at which the truncation is exact for this pair, judged from the
/// function families (polynomial degrees): order 0 needs a constant average and an affine
/// perturbation; order 1 a quadratic average and an affine perturbation; order 2 a
/// quadratic average and a perturbation at most cubic in `q` and quadratic in `p`.
pub fn exact_order(pair: &HamiltonianPair) -> Option<u32> {
    let avg = &pair.average;
    let delta = &pair.delta;
    let all = |v: &[Profile], f: fn(&Profile) -> bool| v.iter().all(f);
    let avg_constant = all(&avg.kinetic, Profile::is_constant) && all(&avg.potential, Profile::is_constant);
    let avg_quadratic = all(&avg.kinetic, Profile::is_quadratic) && all(&avg.potential, Profile::is_quadratic);
    let delta_affine = all(&delta.kinetic, Profile::is_affine) && all(&delta.potential, Profile::is_affine);
    let delta_cubic = all(&delta.kinetic, Profile::is_quadratic)
        && delta
            .potential
            .iter()
            .all(|v| v.is_polynomial() && v.degree() <= 3);
    if avg_constant && delta_affine {
        Some(0)
    } else if avg_quadratic && delta_affine {
        Some(1)
    } else if avg_quadratic && delta_cubic {
        Some(2)
    } else {
        None
    }
}

//! Closed-form second-order amplitude for quadratic systems.
//!
//! When `T`, `V` and `ΔV` are quadratic, the smeared-delta path integral is a complex
//! Gaussian integral over `(q₀, p₀, p₁, ..., p_{n-1})`. Instead of assembling the full
//! exponent matrix, the integral is evaluated as a forward pass: a Gaussian message in the
//! current phase-space point is sheared by the drift, multiplied by the `ΔV` phase and by
//! the next smeared delta, and the old momentum is integrated out. One variable is
//! eliminated per step, so the square-root branch is fixed locally at every step.

use num_complex::Complex64;

use super::{EstimatorConfig, FidelitySeries, SeriesMeta};
use crate::error::{Error, Result};
use crate::hamiltonians::{HamiltonianPair, Profile};
use crate::states::InitialState;

/// Pivots smaller than this relative to the largest matrix entry are treated as singular.
const SINGULAR_RATIO: f64 = 1e-13;

/// `E(z) = -½ zᵀAz + bᵀz + c`, the exponent of an unnormalized complex Gaussian.
#[derive(Debug, Clone)]
struct Quadratic {
    a: Vec<Vec<Complex64>>,
    b: Vec<Complex64>,
    c: Complex64,
}

impl Quadratic {
    fn dim(&self) -> usize {
        self.b.len()
    }

    /// Appends a variable that the exponent does not depend on yet.
    fn push_variable(&mut self) {
        for row in &mut self.a {
            row.push(Complex64::new(0.0, 0.0));
        }
        self.b.push(Complex64::new(0.0, 0.0));
        self.a.push(vec![Complex64::new(0.0, 0.0); self.b.len()]);
    }

    /// `E += coef·(v·z + v0)²`.
    fn add_square(&mut self, coef: Complex64, v: &[f64], v0: f64) {
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                self.a[i][j] -= coef * (2.0 * v[i] * v[j]);
            }
            self.b[i] += coef * (2.0 * v0 * v[i]);
        }
        self.c += coef * (v0 * v0);
    }

    /// Rewrites `E(z_old)` in terms of `z_new`, where `z_old = L z_new + t`.
    fn substitute(&mut self, l: &[Vec<f64>], t: &[f64]) {
        let n = self.dim();
        let mut at = vec![Complex64::new(0.0, 0.0); n];
        for i in 0..n {
            for j in 0..n {
                at[i] += self.a[i][j] * t[j];
            }
        }
        for i in 0..n {
            self.c += self.b[i] * t[i] - 0.5 * at[i] * t[i];
        }
        let shifted: Vec<Complex64> = (0..n).map(|i| self.b[i] - at[i]).collect();
        let mut a_new = vec![vec![Complex64::new(0.0, 0.0); n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..n {
                    for m in 0..n {
                        acc += self.a[k][m] * (l[k][i] * l[m][j]);
                    }
                }
                a_new[i][j] = acc;
            }
        }
        self.a = a_new;
        self.b = (0..n)
            .map(|i| (0..n).map(|k| shifted[k] * l[k][i]).sum())
            .collect();
    }

    /// Integrates variable `j` over the real line (principal branch of the square root).
    fn eliminate(&mut self, j: usize, step: usize) -> Result<()> {
        let alpha = self.a[j][j];
        let scale = self
            .a
            .iter()
            .flatten()
            .fold(0.0f64, |m, x| m.max(x.norm()));
        if !(alpha.norm() > SINGULAR_RATIO * scale) || !alpha.is_finite() {
            return Err(Error::SingularExponent {
                step,
                condition: scale / alpha.norm(),
            });
        }
        let beta = self.b[j];
        self.c += beta * beta / (2.0 * alpha) + 0.5 * (Complex64::new(2.0 * std::f64::consts::PI, 0.0) / alpha).ln();
        let u: Vec<Complex64> = (0..self.dim()).map(|i| self.a[i][j]).collect();
        for i in 0..self.dim() {
            for k in 0..self.dim() {
                self.a[i][k] -= u[i] * u[k] / alpha;
            }
            self.b[i] -= u[i] * beta / alpha;
        }
        self.a.remove(j);
        for row in &mut self.a {
            row.remove(j);
        }
        self.b.remove(j);
        Ok(())
    }

    /// `∫ exp(E) dz` over all remaining variables.
    fn integral(mut self, step: usize) -> Result<Complex64> {
        while self.dim() > 0 {
            self.eliminate(0, step)?;
        }
        Ok(self.c.exp())
    }
}

/// Coefficients `(c0, c1, c2)` of a polynomial profile of degree at most two.
fn quadratic_coeffs(profile: &Profile, what: &str) -> Result<[f64; 3]> {
    if !profile.is_quadratic() {
        return Err(Error::Precondition(format!("{what} must be a polynomial of degree at most 2")));
    }
    let c = profile.coefficients();
    Ok([c[0], c[1], c[2]])
}

/// Exact value of the second-order path integral for a single Gaussian state when the
/// average Hamiltonian is quadratic and `ΔH = ΔV(q)` is quadratic.
pub fn f2_gaussian_chain(
    state: &InitialState,
    pair: &HamiltonianPair,
    cfg: &EstimatorConfig,
) -> Result<FidelitySeries> {
    cfg.validate()?;
    if !state.is_pure_gaussian() {
        return Err(Error::Precondition("the Gaussian chain needs a single Gaussian component".into()));
    }
    if pair.dims() != 1 || state.dims() != 1 {
        return Err(Error::Precondition("the Gaussian chain is one-dimensional".into()));
    }
    if !pair.delta().is_momentum_independent() {
        return Err(Error::Precondition("the perturbation must not depend on momentum".into()));
    }
    let [_, t1, t2] = quadratic_coeffs(&pair.average().kinetic()[0], "average kinetic energy")?;
    let [_, v1, v2] = quadratic_coeffs(&pair.average().potential()[0], "average potential")?;
    let [d0, d1, d2] = quadratic_coeffs(&pair.delta().potential()[0], "potential perturbation")?;
    let dt0 = pair.delta().kinetic()[0].coefficients()[0];

    let meta = SeriesMeta {
        estimator: "f2_gaussian".into(),
        ..Default::default()
    };
    let (tau, hbar) = (cfg.tau, cfg.hbar);
    let h = crate::planck(hbar);
    let g = &state.components()[0];
    let (s, qb, pb) = (g.width[0], g.center_q[0], g.center_p[0]);

    // Wigner density times h⁻¹, over (q, p).
    let mut msg = Quadratic {
        a: vec![
            vec![Complex64::new(2.0 / (s * s), 0.0), Complex64::new(0.0, 0.0)],
            vec![Complex64::new(0.0, 0.0), Complex64::new(2.0 * s * s / (hbar * hbar), 0.0)],
        ],
        b: vec![
            Complex64::new(2.0 * qb / (s * s), 0.0),
            Complex64::new(2.0 * pb * s * s / (hbar * hbar), 0.0),
        ],
        c: Complex64::new(-qb * qb / (s * s) - pb * pb * s * s / (hbar * hbar) + (2.0 / h).ln(), 0.0),
    };

    let a_n = tau * 2.0 * d2 / (8.0 * hbar);
    let degenerate = a_n.abs() < cfg.degenerate_a_threshold;
    let kappa = Complex64::new(0.0, -tau / hbar);
    let identity = |off: (usize, usize), x: f64| {
        let mut l = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        l[off.0][off.1] = x;
        l
    };

    let mut values = vec![Complex64::new(1.0, 0.0)];
    for step in 1..=cfg.n_steps {
        // Drift: q_{n-1} = q_n - τT'(p_{n-1}).
        msg.substitute(&identity((0, 1), -2.0 * tau * t2), &[-tau * t1, 0.0]);
        // Phase exp(-iτΔH/ħ) with ΔV at the new position.
        msg.c += kappa * (d0 + dt0);
        msg.b[0] += kappa * d1;
        msg.a[0][0] -= kappa * (2.0 * d2);

        values.push(msg.clone().integral(step)?);
        if step == cfg.n_steps {
            break;
        }

        if degenerate {
            // p_{n-1} = p_n + τV'(q_n).
            msg.substitute(&identity((1, 0), 2.0 * tau * v2), &[0.0, tau * v1]);
        } else {
            msg.push_variable();
            let i = Complex64::i();
            msg.c += ((Complex64::new(std::f64::consts::PI, 0.0) / (i * a_n)).sqrt() / h).ln();
            msg.add_square(
                i / (4.0 * a_n),
                &[2.0 * tau * v2 / hbar, -1.0 / hbar, 1.0 / hbar],
                tau * v1 / hbar,
            );
            msg.eliminate(1, step)?;
        }
    }
    Ok(FidelitySeries::from_parts(tau, values, vec![0.0; cfg.n_steps + 1], meta))
}

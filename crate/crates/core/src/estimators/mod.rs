//! Phase-space estimators of the fidelity amplitude.
//!
//! All Monte Carlo estimators share one execution model: the trajectory index range is
//! split into `n_batches` contiguous batches, each batch is reduced sequentially in index
//! order, and batch results are combined in batch order. Every path draws from its own
//! random stream (see [`crate::states::path_rng`]), so results do not depend on the
//! number of worker threads.
//!
//! Series values at different times reuse the same path ensemble, so their errors are
//! correlated.

mod chain;
mod dr;
mod series;
mod smeared;
mod static_avg;

pub use chain::f2_gaussian_chain;
pub use dr::{f1_dr, f1_path};
pub use series::{FidelitySeries, SeriesMeta};
pub use smeared::{f2_mc, f2_path};
pub use static_avg::f0;

use std::ops::Range;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which Hamiltonian generates the trajectories of the dephasing representation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reference {
    #[default]
    Average,
    HPrime,
}

/// Integration contour for the smeared momentum update of the second-order estimator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum F2Contour {
    /// Momenta move along the steepest-descent line of the complex Gaussian kernel, where
    /// the kernel is an exactly normalized real Gaussian (unit weights, complex paths).
    #[default]
    SteepestDescent,
    /// Real momenta drawn from a Gaussian proposal; the oscillatory kernel enters the
    /// path weight.
    RealAxis,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatorConfig {
    pub n_traj: usize,
    pub seed: u64,
    pub tau: f64,
    pub n_steps: usize,
    pub hbar: f64,
    /// Scale of the real-axis proposal width (f² only).
    pub proposal_width_factor: f64,
    /// `|a_n|` below which the smeared update collapses to the classical one (f² only).
    pub degenerate_a_threshold: f64,
    pub n_batches: usize,
    pub f2_contour: F2Contour,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        Self {
            n_traj: 10_000,
            seed: 0,
            tau: 0.05,
            n_steps: 252,
            hbar: 1.0,
            proposal_width_factor: 2.0,
            degenerate_a_threshold: 1e-10,
            n_batches: 32,
            f2_contour: F2Contour::SteepestDescent,
        }
    }
}

impl EstimatorConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")))
            }
        };
        if self.n_traj == 0 {
            return Err(Error::InvalidParameter("n_traj must be at least 1".into()));
        }
        if self.n_batches == 0 {
            return Err(Error::InvalidParameter("n_batches must be at least 1".into()));
        }
        positive("tau", self.tau)?;
        positive("hbar", self.hbar)?;
        positive("proposal_width_factor", self.proposal_width_factor)?;
        positive("degenerate_a_threshold", self.degenerate_a_threshold)
    }

    pub(crate) fn batch_ranges(&self) -> Vec<Range<usize>> {
        let n = self.n_traj;
        let b = self.n_batches.min(n);
        (0..b).map(|i| (i * n / b)..((i + 1) * n / b)).collect()
    }
}

/// Running mean and second moment (Welford).
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    count: f64,
    mean: f64,
    m2: f64,
}

impl Moments {
    #[inline]
    fn push(&mut self, x: f64) {
        self.count += 1.0;
        let delta = x - self.mean;
        self.mean += delta / self.count;
        self.m2 += delta * (x - self.mean);
    }

    fn merge(&mut self, other: &Moments) {
        if other.count == 0.0 {
            return;
        }
        let count = self.count + other.count;
        let delta = other.mean - self.mean;
        self.mean += delta * other.count / count;
        self.m2 += other.m2 + delta * delta * self.count * other.count / count;
        self.count = count;
    }

    fn variance(&self) -> f64 {
        if self.count > 1.0 {
            self.m2 / (self.count - 1.0)
        } else {
            0.0
        }
    }
}

/// Per-batch reduction of path contributions `c_i(n)` (and optionally path weights).
struct BatchSums {
    count: usize,
    sum: Vec<Complex64>,
    re: Vec<Moments>,
    im: Vec<Moments>,
    weight_sum: Vec<Complex64>,
    weight_sq: Vec<f64>,
}

impl BatchSums {
    fn new(len: usize) -> Self {
        Self {
            count: 0,
            sum: vec![Complex64::new(0.0, 0.0); len],
            re: vec![Moments::default(); len],
            im: vec![Moments::default(); len],
            weight_sum: vec![Complex64::new(0.0, 0.0); len],
            weight_sq: vec![0.0; len],
        }
    }

    fn push(&mut self, contrib: &[Complex64], weights: Option<&[Complex64]>) {
        self.count += 1;
        for (n, c) in contrib.iter().enumerate() {
            self.sum[n] += *c;
            self.re[n].push(c.re);
            self.im[n].push(c.im);
        }
        if let Some(w) = weights {
            for (n, w) in w.iter().enumerate() {
                self.weight_sum[n] += *w;
                self.weight_sq[n] += w.norm_sqr();
            }
        }
    }
}

/// How the per-time standard error is formed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum ErrorModel {
    /// Sample variance of the real and imaginary parts, combined in quadrature.
    Sample,
    /// Variance of batch means, combined in quadrature.
    BatchMeans,
}

pub(crate) struct Reduced {
    pub values: Vec<Complex64>,
    pub stderr: Vec<f64>,
    pub min_ess: Option<f64>,
}

/// Runs `path(index, contrib, weights)` over all trajectory indices in fixed batches and
/// reduces deterministically. `weights` is `Some` only when `track_weights` is set.
pub(crate) fn run_ensemble<F>(
    cfg: &EstimatorConfig,
    len: usize,
    model: ErrorModel,
    track_weights: bool,
    path: F,
) -> Result<Reduced>
where
    F: Fn(u64, &mut [Complex64], Option<&mut [Complex64]>) -> Result<()> + Sync,
{
    let batches: Vec<BatchSums> = cfg
        .batch_ranges()
        .into_par_iter()
        .map(|range| {
            let mut sums = BatchSums::new(len);
            let mut contrib = vec![Complex64::new(0.0, 0.0); len];
            let mut weights = vec![Complex64::new(1.0, 0.0); len];
            for i in range {
                if track_weights {
                    path(i as u64, &mut contrib, Some(&mut weights))?;
                    sums.push(&contrib, Some(&weights));
                } else {
                    path(i as u64, &mut contrib, None)?;
                    sums.push(&contrib, None);
                }
            }
            Ok(sums)
        })
        .collect::<Result<Vec<_>>>()?;

    let n_total = cfg.n_traj as f64;
    let mut total = vec![Complex64::new(0.0, 0.0); len];
    let mut re = vec![Moments::default(); len];
    let mut im = vec![Moments::default(); len];
    let mut weight_sum = vec![Complex64::new(0.0, 0.0); len];
    let mut weight_sq = vec![0.0; len];
    for b in &batches {
        for n in 0..len {
            total[n] += b.sum[n];
            re[n].merge(&b.re[n]);
            im[n].merge(&b.im[n]);
            weight_sum[n] += b.weight_sum[n];
            weight_sq[n] += b.weight_sq[n];
        }
    }
    let values: Vec<Complex64> = total.iter().map(|s| s / n_total).collect();

    let stderr = match model {
        ErrorModel::Sample => (0..len)
            .map(|n| ((re[n].variance() + im[n].variance()) / n_total).sqrt())
            .collect(),
        ErrorModel::BatchMeans => {
            let nb = batches.len() as f64;
            (0..len)
                .map(|n| {
                    if batches.len() < 2 {
                        return 0.0;
                    }
                    let mut mr = Moments::default();
                    let mut mi = Moments::default();
                    for b in &batches {
                        let m = b.sum[n] / b.count as f64;
                        mr.push(m.re);
                        mi.push(m.im);
                    }
                    ((mr.variance() + mi.variance()) / nb).sqrt()
                })
                .collect()
        }
    };

    let min_ess = track_weights.then(|| {
        (0..len)
            .map(|n| {
                if weight_sq[n] > 0.0 {
                    weight_sum[n].norm_sqr() / weight_sq[n]
                } else {
                    0.0
                }
            })
            .fold(f64::INFINITY, f64::min)
    });

    Ok(Reduced {
        values,
        stderr,
        min_ess,
    })
}

/// `exp(-iΦ/ħ)` for a real accumulated phase.
#[inline]
pub(crate) fn phase_factor(phi: f64, hbar: f64) -> Complex64 {
    Complex64::new(0.0, -phi / hbar).exp()
}

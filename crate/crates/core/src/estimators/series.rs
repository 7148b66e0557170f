use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SeriesMeta {
    pub estimator: String,
    /// Number of sampled paths (0 for deterministic evaluations).
    pub n_traj: usize,
    pub seed: Option<u64>,
    /// Smallest effective sample size over time, for weighted estimators.
    pub min_ess: Option<f64>,
    #[serde(default)]
    pub notes: Vec<String>,
}

/// Fidelity amplitude `f(nτ)` for `n = 0..=N` with per-time statistical errors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FidelitySeries {
    pub times: Vec<f64>,
    pub values: Vec<Complex64>,
    pub stderr: Vec<f64>,
    pub meta: SeriesMeta,
}

impl FidelitySeries {
    pub fn new(times: Vec<f64>, values: Vec<Complex64>, stderr: Vec<f64>, meta: SeriesMeta) -> Result<Self> {
        if times.len() != values.len() || times.len() != stderr.len() {
            return Err(Error::InvalidParameter(format!(
                "series columns differ in length: {} times, {} values, {} errors",
                times.len(),
                values.len(),
                stderr.len()
            )));
        }
        if times.is_empty() {
            return Err(Error::InvalidParameter("empty series".into()));
        }
        Ok(Self {
            times,
            values,
            stderr,
            meta,
        })
    }

    pub(crate) fn from_parts(tau: f64, values: Vec<Complex64>, stderr: Vec<f64>, meta: SeriesMeta) -> Self {
        let times = (0..values.len()).map(|n| n as f64 * tau).collect();
        Self {
            times,
            values,
            stderr,
            meta,
        }
    }

    /// `f ≡ 1` with zero error.
    pub(crate) fn ones(tau: f64, n_steps: usize, meta: SeriesMeta) -> Self {
        Self::from_parts(
            tau,
            vec![Complex64::new(1.0, 0.0); n_steps + 1],
            vec![0.0; n_steps + 1],
            meta,
        )
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn n_steps(&self) -> usize {
        self.values.len() - 1
    }

    /// Time step, from the first two samples (0 for a single-point series).
    pub fn tau(&self) -> f64 {
        if self.times.len() > 1 {
            self.times[1] - self.times[0]
        } else {
            0.0
        }
    }

    /// `|f_self(t_n) - f_other(t_n)|` per step.
    pub fn deviation(&self, other: &FidelitySeries) -> Vec<f64> {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .collect()
    }

    pub fn max_deviation(&self, other: &FidelitySeries) -> f64 {
        self.deviation(other).into_iter().fold(0.0, f64::max)
    }

    /// Fidelity `|f|²` per step.
    pub fn fidelity(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm_sqr()).collect()
    }
}

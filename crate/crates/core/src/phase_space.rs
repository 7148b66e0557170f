use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point `x = (q, p)` of a `2D`-dimensional phase space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub q: Vec<f64>,
    pub p: Vec<f64>,
}

impl PhasePoint {
    pub fn new(q: Vec<f64>, p: Vec<f64>) -> Result<Self> {
        if q.len() != p.len() {
            return Err(Error::DimensionMismatch {
                expected: q.len(),
                got: p.len(),
            });
        }
        Ok(Self { q, p })
    }

    /// One degree of freedom.
    pub fn one(q: f64, p: f64) -> Self {
        Self {
            q: vec![q],
            p: vec![p],
        }
    }

    pub fn dims(&self) -> usize {
        self.q.len()
    }

    /// Largest absolute coordinate, used by the escape guard.
    pub fn max_abs(&self) -> f64 {
        self.q
            .iter()
            .chain(self.p.iter())
            .fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn norm(&self) -> f64 {
        self.q
            .iter()
            .chain(self.p.iter())
            .map(|v| v * v)
            .sum::<f64>()
            .sqrt()
    }

    pub(crate) fn check_dims(&self, dims: usize) -> Result<()> {
        if self.dims() != dims {
            return Err(Error::DimensionMismatch {
                expected: dims,
                got: self.dims(),
            });
        }
        Ok(())
    }
}

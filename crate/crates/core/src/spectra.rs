//! Damped Fourier transform of a fidelity-amplitude series:
//!
//! ```text
//! I(ω) = Re ∫₀^T f(t) e^{iωt} e^{-t/T_d} dt
//! ```
//!
//! evaluated with trapezoidal weights on the series grid and zero padding, so a pure phase
//! `f(t) = exp(-iω₀t)` peaks at `ω = ω₀`. Intensities are the real part without clipping,
//! which keeps the map linear in `f`.

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::FidelitySeries;

/// Shortest series accepted (`N ≥ 8`).
const MIN_STEPS: usize = 8;
/// Zero-padded length relative to the series length.
const PADDING: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    /// Ascending angular frequencies, spaced by `2π/(Lτ)`.
    pub frequencies: Vec<f64>,
    pub intensities: Vec<f64>,
    pub damping_time: f64,
}

impl Spectrum {
    pub fn resolution(&self) -> f64 {
        self.frequencies[1] - self.frequencies[0]
    }

    /// Frequency of the largest intensity.
    pub fn peak_frequency(&self) -> f64 {
        let (i, _) = self
            .intensities
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (i, &v)| if v > best.1 { (i, v) } else { best });
        self.frequencies[i]
    }

    /// Indices of strict local maxima whose intensity exceeds `min_fraction` of the largest.
    pub fn local_maxima(&self, min_fraction: f64) -> Vec<usize> {
        let top = self.intensities.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let v = &self.intensities;
        (1..v.len() - 1)
            .filter(|&i| v[i] > v[i - 1] && v[i] >= v[i + 1] && v[i] >= min_fraction * top)
            .collect()
    }

    /// Full width at half maximum of the peak at index `i` (linear interpolation).
    pub fn fwhm(&self, i: usize) -> f64 {
        let v = &self.intensities;
        let w = &self.frequencies;
        let half = 0.5 * v[i];
        let mut lo = i;
        while lo > 0 && v[lo] > half {
            lo -= 1;
        }
        let mut hi = i;
        while hi + 1 < v.len() && v[hi] > half {
            hi += 1;
        }
        let cross = |a: usize, b: usize| w[a] + (half - v[a]) * (w[b] - w[a]) / (v[b] - v[a]);
        cross(hi - 1, hi) - cross(lo, lo + 1)
    }
}

pub fn spectrum(series: &FidelitySeries, damping_time: f64) -> Result<Spectrum> {
    let n_steps = series.len().saturating_sub(1);
    if n_steps < MIN_STEPS {
        return Err(Error::SeriesTooShort(series.len()));
    }
    if !(damping_time > 0.0) || !damping_time.is_finite() {
        return Err(Error::InvalidParameter(format!("damping time must be positive, got {damping_time}")));
    }
    let tau = series.tau();
    let uniform = series
        .times
        .iter()
        .enumerate()
        .all(|(k, &t)| (t - k as f64 * tau).abs() <= 1e-9 * tau.max(t.abs()));
    if !(tau > 0.0) || !uniform {
        return Err(Error::InvalidParameter("spectrum needs a uniform time grid".into()));
    }

    let len = (PADDING * series.len()).next_power_of_two();
    let mut buffer = vec![Complex64::new(0.0, 0.0); len];
    for (k, (f, t)) in series.values.iter().zip(&series.times).enumerate() {
        let end = if k == 0 || k == n_steps { 0.5 } else { 1.0 };
        buffer[k] = f * (tau * end * (-t / damping_time).exp());
    }
    // Σ_k g_k e^{+2πi jk/L} is the unnormalized inverse DFT.
    FftPlanner::new().plan_fft_inverse(len).process(&mut buffer);

    let dw = 2.0 * std::f64::consts::PI / (len as f64 * tau);
    let half = len / 2;
    let (frequencies, intensities) = (0..len)
        .map(|i| {
            let j = (i + half) % len;
            let signed = j as i64 - if j >= half { len as i64 } else { 0 };
            (signed as f64 * dw, buffer[j].re)
        })
        .unzip();
    Ok(Spectrum {
        frequencies,
        intensities,
        damping_time,
    })
}

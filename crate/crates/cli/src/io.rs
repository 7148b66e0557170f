//! Series, comparison and spectrum files.
//!
//! CSV numbers are written with 17 significant digits, which round-trips every `f64`.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use loschmidt_core::spectra::Spectrum;
use loschmidt_core::{FidelitySeries, SeriesMeta};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const SERIES_COLUMNS: [&str; 6] = ["step", "time", "re_f", "im_f", "abs_f_sq", "stderr"];

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_series_csv(path: &Path, series: &FidelitySeries) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(SERIES_COLUMNS)?;
    for (n, ((t, v), e)) in series.times.iter().zip(&series.values).zip(&series.stderr).enumerate() {
        w.write_record([n.to_string(), num(*t), num(v.re), num(v.im), num(v.norm_sqr()), num(*e)])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Deserialize)]
struct SeriesRow {
    step: usize,
    time: f64,
    re_f: f64,
    im_f: f64,
    #[allow(dead_code)]
    abs_f_sq: f64,
    stderr: f64,
}

/// Reads a series written by [`write_series_csv`]; metadata is not stored in the CSV.
pub fn read_series_csv(path: &Path, meta: SeriesMeta) -> Result<FidelitySeries, CliError> {
    let mut r = csv::Reader::from_path(path)?;
    let (mut times, mut values, mut stderr) = (Vec::new(), Vec::new(), Vec::new());
    for (n, row) in r.deserialize::<SeriesRow>().enumerate() {
        let row = row?;
        if row.step != n {
            return Err(CliError::Config(format!("{}: step {} out of order", path.display(), row.step)));
        }
        times.push(row.time);
        values.push(Complex64::new(row.re_f, row.im_f));
        stderr.push(row.stderr);
    }
    Ok(FidelitySeries::new(times, values, stderr, meta)?)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

pub fn read_series_json(path: &Path) -> Result<FidelitySeries, CliError> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

/// Deviation of one estimator from the exact series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub estimator: String,
    pub max_deviation: f64,
    pub step_of_max: usize,
    /// Largest `|f - f_exact| / (3·stderr + 1e-6)`; at most 1 when within the band everywhere.
    pub max_band_ratio: f64,
    pub deviation: Vec<f64>,
}

pub const BAND_FLOOR: f64 = 1e-6;

pub fn compare(series: &FidelitySeries, exact: &FidelitySeries) -> Comparison {
    let deviation = series.deviation(exact);
    let (step_of_max, max_deviation) = deviation
        .iter()
        .enumerate()
        .fold((0, 0.0), |best, (n, &d)| if d > best.1 { (n, d) } else { best });
    let max_band_ratio = deviation
        .iter()
        .zip(&series.stderr)
        .map(|(d, e)| d / (3.0 * e + BAND_FLOOR))
        .fold(0.0, f64::max);
    Comparison {
        estimator: series.meta.estimator.clone(),
        max_deviation,
        step_of_max,
        max_band_ratio,
        deviation,
    }
}

/// Per-step table `estimator,step,time,deviation,stderr` and a per-estimator summary.
pub fn write_comparison(dir: &Path, rows: &[(Comparison, &FidelitySeries)]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(dir.join("comparison.csv"))?;
    w.write_record(["estimator", "step", "time", "deviation", "stderr"])?;
    for (c, s) in rows {
        for (n, d) in c.deviation.iter().enumerate() {
            w.write_record([c.estimator.clone(), n.to_string(), num(s.times[n]), num(*d), num(s.stderr[n])])?;
        }
    }
    w.flush()?;

    let mut w = csv::Writer::from_path(dir.join("comparison_summary.csv"))?;
    w.write_record(["estimator", "max_deviation", "step_of_max", "max_band_ratio"])?;
    for (c, _) in rows {
        w.write_record([c.estimator.clone(), num(c.max_deviation), c.step_of_max.to_string(), num(c.max_band_ratio)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_spectrum_csv(path: &Path, spectrum: &Spectrum) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["omega", "intensity"])?;
    for (o, i) in spectrum.frequencies.iter().zip(&spectrum.intensities) {
        w.write_record([num(*o), num(*i)])?;
    }
    w.flush()?;
    Ok(())
}

//! Executes a [`RunConfig`] and writes its output files.

use std::path::{Path, PathBuf};

use log::info;
use loschmidt_core::estimators::{f0, f1_dr, f2_gaussian_chain, f2_mc};
use loschmidt_core::qgrid::fidelity_exact;
use loschmidt_core::spectra::spectrum;
use loschmidt_core::FidelitySeries;
use serde::Serialize;

use crate::config::{EstimatorName, OutputFormat, RunConfig};
use crate::io::{self, Comparison};
use crate::CliError;

#[derive(Debug, Clone)]
pub struct RunReport {
    pub output_dir: PathBuf,
    pub series: Vec<FidelitySeries>,
    /// Empty unless `exact` was requested.
    pub comparisons: Vec<Comparison>,
    pub files: Vec<PathBuf>,
}

impl RunReport {
    pub fn series(&self, name: EstimatorName) -> Option<&FidelitySeries> {
        self.series.iter().find(|s| s.meta.estimator == name.as_str())
    }
}

#[derive(Serialize)]
struct Metadata<'a> {
    cli_version: &'static str,
    core_version: &'static str,
    config: &'a RunConfig,
    scenario: &'a loschmidt_core::presets::Scenario,
    estimator_config: &'a loschmidt_core::EstimatorConfig,
    series: Vec<&'a loschmidt_core::SeriesMeta>,
    notes: Vec<&'static str>,
}

/// Runs every requested estimator and writes series, comparison, spectra and metadata
/// files into `output_dir`.
pub fn run(config: &RunConfig, output_dir: &Path) -> Result<RunReport, CliError> {
    let scenario = config.resolve_scenario()?;
    let cfg = config.estimator_config(&scenario)?;
    std::fs::create_dir_all(output_dir)?;

    let mut names = config.estimators.clone();
    names.sort();
    names.dedup();

    let mut series = Vec::with_capacity(names.len());
    for name in &names {
        info!("{}: running {}", scenario.name, name.as_str());
        let s = match name {
            EstimatorName::Exact => {
                fidelity_exact(&scenario.state, &scenario.pair, cfg.n_steps, cfg.tau, cfg.hbar, &scenario.grid)?
            }
            EstimatorName::F0 => f0(&scenario.state, &scenario.pair, &cfg)?,
            EstimatorName::F1 => f1_dr(&scenario.state, &scenario.pair, &cfg, config.reference)?,
            EstimatorName::F2Mc => f2_mc(&scenario.state, &scenario.pair, &cfg)?,
            EstimatorName::F2Gaussian => f2_gaussian_chain(&scenario.state, &scenario.pair, &cfg)?,
        };
        series.push(s);
    }

    let ext = match config.format {
        OutputFormat::Csv => "csv",
        OutputFormat::Json => "json",
    };
    let mut files = Vec::new();
    for s in &series {
        let path = output_dir.join(format!("series_{}.{ext}", s.meta.estimator));
        match config.format {
            OutputFormat::Csv => io::write_series_csv(&path, s)?,
            OutputFormat::Json => io::write_json(&path, s)?,
        }
        files.push(path);
    }

    let mut comparisons = Vec::new();
    if let Some(exact) = series.iter().find(|s| s.meta.estimator == EstimatorName::Exact.as_str()) {
        let rows: Vec<(Comparison, &FidelitySeries)> = series
            .iter()
            .filter(|s| s.meta.estimator != exact.meta.estimator)
            .map(|s| (io::compare(s, exact), s))
            .collect();
        io::write_comparison(output_dir, &rows)?;
        files.push(output_dir.join("comparison.csv"));
        files.push(output_dir.join("comparison_summary.csv"));
        comparisons = rows.into_iter().map(|(c, _)| c).collect();
    }

    if let Some(damping) = config.damping_time {
        for s in &series {
            let path = output_dir.join(format!("spectrum_{}.csv", s.meta.estimator));
            io::write_spectrum_csv(&path, &spectrum(s, damping)?)?;
            files.push(path);
        }
    }

    let meta_path = output_dir.join("metadata.json");
    io::write_json(
        &meta_path,
        &Metadata {
            cli_version: crate::VERSION,
            core_version: loschmidt_core::VERSION,
            config,
            scenario: &scenario,
            estimator_config: &cfg,
            series: series.iter().map(|s| &s.meta).collect(),
            notes: vec!["values at different steps of one sampled series share trajectories and are correlated"],
        },
    )?;
    files.push(meta_path);

    Ok(RunReport { output_dir: output_dir.to_path_buf(), series, comparisons, files })
}

//! Run configuration, read from a TOML file.
//!
//! ```toml
//! scenario = "displaced_ho"      # or an inline [system] table
//! estimators = ["exact", "f1"]   # exact | f0 | f1 | f2_mc | f2_gaussian
//! n_traj = 10000
//! seed = 7
//! # optional overrides of the scenario defaults
//! tau = 0.05
//! n_steps = 252
//! hbar = 1.0
//! grid_points = 4096
//! reference = "average"          # average | h_prime
//! f2_contour = "steepest_descent"  # steepest_descent | real_axis
//! proposal_width_factor = 2.0
//! degenerate_a_threshold = 1e-10
//! n_batches = 32
//! format = "csv"                 # csv | json
//! damping_time = 10.0            # also write spectra
//! output_dir = "out"
//! ```
//!
//! An inline system is one-dimensional with `T = p²/2m` and polynomial (plus optional
//! `K cos q`) potentials given by ascending coefficients:
//!
//! ```toml
//! [system]
//! potential_prime = [0.125, -0.5, 0.5]
//! potential_double_prime = [0.125, 0.5, 0.5]
//! center_q = 0.5
//! ```

use std::path::{Path, PathBuf};

use loschmidt_core::presets::{self, Exactness, Scenario};
use loschmidt_core::qgrid::{Axis, Grid};
use loschmidt_core::{
    make_pair, EstimatorConfig, F2Contour, GaussianComponent, InitialState, Profile, Reference,
    SeparableHamiltonian,
};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorName {
    Exact,
    F0,
    F1,
    F2Mc,
    F2Gaussian,
}

impl EstimatorName {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Exact => "exact",
            Self::F0 => "f0",
            Self::F1 => "f1",
            Self::F2Mc => "f2_mc",
            Self::F2Gaussian => "f2_gaussian",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentDef {
    pub center_q: f64,
    #[serde(default)]
    pub center_p: f64,
    #[serde(default = "one")]
    pub width: f64,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemDef {
    #[serde(default = "one")]
    pub mass_prime: f64,
    #[serde(default = "one")]
    pub mass_double_prime: f64,
    #[serde(default)]
    pub potential_prime: Vec<f64>,
    #[serde(default)]
    pub potential_double_prime: Vec<f64>,
    #[serde(default)]
    pub kick_prime: f64,
    #[serde(default)]
    pub kick_double_prime: f64,
    #[serde(default)]
    pub center_q: f64,
    #[serde(default)]
    pub center_p: f64,
    #[serde(default = "one")]
    pub width: f64,
    /// Gaussian mixture; replaces `center_q`, `center_p` and `width` when present.
    #[serde(default)]
    pub components: Vec<ComponentDef>,
    #[serde(default = "default_grid_min")]
    pub grid_min: f64,
    #[serde(default = "default_grid_max")]
    pub grid_max: f64,
    #[serde(default = "default_grid_points")]
    pub grid_points: usize,
    /// The coordinate is an angle on `[grid_min, grid_max)`.
    #[serde(default)]
    pub periodic: bool,
}

fn one() -> f64 {
    1.0
}
fn default_grid_min() -> f64 {
    -20.0
}
fn default_grid_max() -> f64 {
    20.0
}
fn default_grid_points() -> usize {
    4096
}
fn default_n_traj() -> usize {
    10_000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub scenario: Option<String>,
    #[serde(default)]
    pub system: Option<SystemDef>,
    pub estimators: Vec<EstimatorName>,
    #[serde(default = "default_n_traj")]
    pub n_traj: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub tau: Option<f64>,
    #[serde(default)]
    pub n_steps: Option<usize>,
    #[serde(default)]
    pub hbar: Option<f64>,
    #[serde(default)]
    pub grid_points: Option<usize>,
    #[serde(default)]
    pub reference: Reference,
    #[serde(default)]
    pub f2_contour: Option<F2Contour>,
    #[serde(default)]
    pub proposal_width_factor: Option<f64>,
    #[serde(default)]
    pub degenerate_a_threshold: Option<f64>,
    #[serde(default)]
    pub n_batches: Option<usize>,
    #[serde(default)]
    pub format: OutputFormat,
    #[serde(default)]
    pub damping_time: Option<f64>,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.check()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    fn check(&self) -> Result<(), CliError> {
        if self.estimators.is_empty() {
            return Err(CliError::Config("at least one estimator is required".into()));
        }
        match (&self.scenario, &self.system) {
            (Some(_), Some(_)) => Err(CliError::Config("give either `scenario` or `[system]`, not both".into())),
            (None, None) => Err(CliError::Config("one of `scenario` or `[system]` is required".into())),
            _ => Ok(()),
        }
    }

    /// The scenario with all overrides applied.
    pub fn resolve_scenario(&self) -> Result<Scenario, CliError> {
        let mut scenario = match (&self.scenario, &self.system) {
            (Some(name), _) => presets::load(name)?,
            (None, Some(system)) => inline_scenario(system)?,
            (None, None) => unreachable!("checked on load"),
        };
        if let Some(tau) = self.tau {
            scenario.tau = tau;
        }
        if let Some(n) = self.n_steps {
            scenario.n_steps = n;
        }
        if let Some(hbar) = self.hbar {
            scenario.hbar = hbar;
        }
        if let Some(m) = self.grid_points {
            let axes = scenario
                .grid
                .axes
                .iter()
                .map(|a| {
                    let axis = Axis::new(a.min, a.max, m)?;
                    Ok(Axis { periodic: a.periodic, ..axis })
                })
                .collect::<loschmidt_core::Result<Vec<_>>>()?;
            scenario.grid = Grid::new(axes)?;
        }
        if let Some(contour) = self.f2_contour {
            scenario.f2_contour = contour;
        }
        Ok(scenario)
    }

    pub fn estimator_config(&self, scenario: &Scenario) -> Result<EstimatorConfig, CliError> {
        let mut cfg = scenario.config(self.n_traj, self.seed);
        if let Some(x) = self.proposal_width_factor {
            cfg.proposal_width_factor = x;
        }
        if let Some(x) = self.degenerate_a_threshold {
            cfg.degenerate_a_threshold = x;
        }
        if let Some(x) = self.n_batches {
            cfg.n_batches = x;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn inline_scenario(sys: &SystemDef) -> Result<Scenario, CliError> {
    let h = |mass: f64, coeffs: &[f64], kick: f64| -> loschmidt_core::Result<SeparableHamiltonian> {
        let potential = Profile::polynomial(coeffs)?.with_cosine(kick);
        SeparableHamiltonian::one_dim(mass, potential)
    };
    let pair = make_pair(
        h(sys.mass_prime, &sys.potential_prime, sys.kick_prime)?,
        h(sys.mass_double_prime, &sys.potential_double_prime, sys.kick_double_prime)?,
    )?;
    let state = if sys.components.is_empty() {
        InitialState::gaussian(vec![sys.center_q], vec![sys.center_p], vec![sys.width])?
    } else {
        InitialState::new(
            sys.components
                .iter()
                .map(|c| GaussianComponent::new(vec![c.center_q], vec![c.center_p], vec![c.width], c.weight))
                .collect::<loschmidt_core::Result<Vec<_>>>()?,
        )?
    };
    let axis = if sys.periodic {
        Axis::periodic(sys.grid_min, sys.grid_max, sys.grid_points)?
    } else {
        Axis::new(sys.grid_min, sys.grid_max, sys.grid_points)?
    };
    let order = loschmidt_core::hamiltonians::exact_order(&pair);
    let exactness = ["f0", "f1", "f2"]
        .iter()
        .enumerate()
        .map(|(k, name)| {
            let exact = order.is_some_and(|o| o as usize <= k);
            (name.to_string(), if exact { Exactness::Exact } else { Exactness::Approximate })
        })
        .collect();
    Ok(Scenario {
        name: "inline".into(),
        description: "system defined in the run configuration".into(),
        pair,
        state,
        tau: 0.05,
        n_steps: 252,
        hbar: 1.0,
        grid: Grid::new(vec![axis])?,
        exactness,
        f2_contour: F2Contour::SteepestDescent,
    })
}

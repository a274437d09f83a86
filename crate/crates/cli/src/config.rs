//! JSON experiment configuration: schema, validation, and conversion into
//! core types. Unknown keys are rejected everywhere so a config file cannot
//! silently carry dead settings.

use serde::{Deserialize, Serialize};

use fracshe_core::error::{Error, Result};
use fracshe_core::estimators::{EstimatorConfig, LocalizationConfig, ProbeDir};
use fracshe_core::grid::Grid;
use fracshe_core::params::{FnSpec, InitSpec, ModelParams};
use fracshe_core::solver::{Scheme, SolverConfig};
use fracshe_core::Real;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, tag = "kind", rename_all = "snake_case")]
pub enum FnSpecConfig {
    Zero,
    Constant { value: f64 },
    Linear { scale: f64 },
    Sine { base: f64, amp: f64 },
    Table { xs: Vec<f64>, ys: Vec<f64> },
}

impl FnSpecConfig {
    pub fn to_core(&self) -> FnSpec<Real> {
        match self {
            FnSpecConfig::Zero => FnSpec::Zero,
            FnSpecConfig::Constant { value } => FnSpec::Constant(*value),
            FnSpecConfig::Linear { scale } => FnSpec::Linear(*scale),
            FnSpecConfig::Sine { base, amp } => FnSpec::Sine {
                base: *base,
                amp: *amp,
            },
            FnSpecConfig::Table { xs, ys } => FnSpec::Table {
                xs: xs.clone(),
                ys: ys.clone(),
            },
        }
    }
}

fn default_one() -> FnSpecConfig {
    FnSpecConfig::Constant { value: 1.0 }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, tag = "kind", rename_all = "snake_case")]
pub enum InitConfig {
    Zero,
    Constant { value: f64 },
    Bump { amplitude: f64, width: f64 },
    Holder { exponent: f64 },
}

impl InitConfig {
    fn to_core(&self) -> InitSpec<Real> {
        match self {
            InitConfig::Zero => InitSpec::Zero,
            InitConfig::Constant { value } => InitSpec::Constant(*value),
            InitConfig::Bump { amplitude, width } => InitSpec::Bump {
                amplitude: *amplitude,
                width: *width,
            },
            InitConfig::Holder { exponent } => InitSpec::Holder {
                exponent: *exponent,
            },
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub alpha: f64,
    pub gamma: f64,
    pub dim: usize,
    #[serde(default = "FnSpecConfig::zero_default")]
    pub drift: FnSpecConfig,
    #[serde(default = "default_one")]
    pub diffusion: FnSpecConfig,
    #[serde(default = "InitConfig::zero_default")]
    pub init: InitConfig,
}

impl FnSpecConfig {
    fn zero_default() -> Self {
        FnSpecConfig::Zero
    }
}

impl InitConfig {
    fn zero_default() -> Self {
        InitConfig::Zero
    }
}

impl ModelConfig {
    pub fn to_core(&self) -> Result<ModelParams<Real>> {
        let params = ModelParams::new(self.alpha, self.gamma, self.dim)
            .with_drift(self.drift.to_core())
            .with_diffusion(self.diffusion.to_core())
            .with_init(self.init.to_core());
        params.validate()?;
        Ok(params)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub extent: f64,
    pub n: usize,
}

impl GridConfig {
    pub fn to_core(&self, dim: usize) -> Result<Grid<Real>> {
        Grid::make(dim, self.extent, self.n)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    pub dt: f64,
    pub t_end: f64,
    #[serde(default)]
    pub record_times: Vec<f64>,
}

impl SolverSection {
    pub fn to_core(&self) -> Result<SolverConfig<Real>> {
        let mut cfg = SolverConfig::new(self.dt, self.t_end);
        cfg.scheme = Scheme::ExpEuler;
        if !self.record_times.is_empty() {
            cfg.record_times = self.record_times.clone();
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleConfig {
    pub members: u64,
    pub seed: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimatorSection {
    /// ε ladder in grid cells.
    pub eps_cells: Vec<usize>,
    #[serde(default = "default_moment_order")]
    pub moment_order: u32,
    #[serde(default)]
    pub variation_levels: Vec<u32>,
    #[serde(default = "default_interval")]
    pub interval: (f64, f64),
    #[serde(default = "default_significance")]
    pub significance: f64,
}

fn default_moment_order() -> u32 {
    2
}
fn default_interval() -> (f64, f64) {
    (0.0, 1.0)
}
fn default_significance() -> f64 {
    0.01
}

impl EstimatorSection {
    pub fn to_core(&self, members: usize) -> EstimatorConfig<Real> {
        EstimatorConfig {
            probe_dirs: vec![ProbeDir { axis: 0, sign: 1 }],
            eps_cells: self.eps_cells.clone(),
            moment_order: self.moment_order,
            variation_levels: self.variation_levels.clone(),
            interval: self.interval,
            ensemble_size: members,
            significance: self.significance,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocalizationSection {
    pub beta_ladder: Vec<f64>,
    pub eps_cells: usize,
    /// Anchor site as a fraction of the grid (0.5 = box centre).
    #[serde(default = "default_anchor_frac")]
    pub anchor_frac: f64,
}

fn default_anchor_frac() -> f64 {
    0.5
}

impl LocalizationSection {
    pub fn to_core(&self, grid: &Grid<Real>) -> LocalizationConfig<Real> {
        let anchor = ((grid.len() as f64 * self.anchor_frac) as usize).min(grid.len() - 1);
        LocalizationConfig {
            beta_ladder: self.beta_ladder.clone(),
            eps_cells: self.eps_cells,
            dir: ProbeDir { axis: 0, sign: 1 },
            anchor,
        }
    }
}

/// Per-experiment thresholds and options.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSection {
    #[serde(default = "default_ks_threshold")]
    pub ks_threshold: f64,
    #[serde(default)]
    pub shuffle_control: bool,
    #[serde(default = "default_anchor_frac")]
    pub anchor_frac: f64,
    #[serde(default = "default_rel_err")]
    pub median_rel_err_threshold: f64,
    #[serde(default = "default_phi")]
    pub phi: FnSpecConfig,
    #[serde(default = "default_band")]
    pub band: (f64, f64),
    #[serde(default = "default_min_fraction")]
    pub min_fraction: f64,
    #[serde(default = "default_anchors")]
    pub anchors: usize,
    #[serde(default)]
    pub lil_eps_cells: Vec<usize>,
    #[serde(default = "default_slope_margin")]
    pub slope_margin: f64,
    #[serde(default = "default_holder_tolerance")]
    pub holder_tolerance: f64,
    #[serde(default)]
    pub tau_steps: Vec<u64>,
}

fn default_ks_threshold() -> f64 {
    0.05
}
fn default_rel_err() -> f64 {
    0.10
}
fn default_phi() -> FnSpecConfig {
    FnSpecConfig::Constant { value: 1.0 }
}
fn default_band() -> (f64, f64) {
    (0.3, 3.0)
}
fn default_min_fraction() -> f64 {
    0.9
}
fn default_anchors() -> usize {
    256
}
fn default_slope_margin() -> f64 {
    0.1
}
fn default_holder_tolerance() -> f64 {
    0.05
}

impl Default for ExperimentSection {
    fn default() -> Self {
        serde_json::from_str("{}").unwrap()
    }
}

/// Top-level experiment configuration file.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelConfig,
    pub grid: GridConfig,
    pub solver: SolverSection,
    pub ensemble: EnsembleConfig,
    #[serde(default)]
    pub estimator: Option<EstimatorSection>,
    #[serde(default)]
    pub localization: Option<LocalizationSection>,
    #[serde(default)]
    pub experiment: ExperimentSection,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("config parse: {e}")))
    }

    /// Serialized resolved form (defaults filled in), the hashing input.
    pub fn resolved_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn estimator_required(&self) -> Result<&EstimatorSection> {
        self.estimator
            .as_ref()
            .ok_or_else(|| Error::Config("this experiment needs an `estimator` section".into()))
    }

    pub fn localization_required(&self) -> Result<&LocalizationSection> {
        self.localization
            .as_ref()
            .ok_or_else(|| Error::Config("this experiment needs a `localization` section".into()))
    }
}

//! Run configuration: a TOML file, overlaid with command-line flags.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use chur::grid::GridSpec;
use chur::states::StateSpec;
use chur::tightness::{Budget, Family, LambdaSplit};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    /// Worker threads; 0 means available parallelism.
    pub workers: usize,
    pub grid: GridConfig,
    pub tolerance: Tolerances,
    pub debug: DebugConfig,
    pub verify: VerifyConfig,
    pub figure1: Figure1Config,
    pub sweep: SweepConfig,
    pub mask: MaskConfig,
    pub qubit: QubitConfig,
    pub finite_dim: FiniteDimConfig,
    pub lqc: LqcConfig,
    pub tightness: TightnessConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub n_points: usize,
    pub length: f64,
    pub hbar: f64,
    pub center: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { n_points: 4096, length: 40.0, hbar: 1.0, center: 0.0 }
    }
}

impl GridConfig {
    pub fn spec(&self) -> Result<GridSpec> {
        GridSpec::new(self.n_points, self.length, self.hbar, self.center).context("grid")
    }
}

/// Tolerances applied to every verdict the CLI prints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub chur_violation: f64,
    pub gram: f64,
    pub transform: f64,
    pub identity: f64,
    pub lower_bound: f64,
    pub mask_relative: f64,
    pub finite_dim: f64,
    /// Qubit reconstruction against the momentum characteristic function.
    pub reconstruction: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        use chur::tolerance as t;
        Self {
            chur_violation: t::CHUR_VIOLATION,
            gram: t::GRAM,
            transform: t::TRANSFORM,
            identity: t::IDENTITY,
            lower_bound: t::LOWER_BOUND,
            mask_relative: t::MASK_RELATIVE,
            finite_dim: t::FINITE_DIM,
            reconstruction: 1e-10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DebugConfig {
    /// Factor applied to B in every verdict; values below 1 force failures.
    pub bound_scale: f64,
}

impl Default for DebugConfig {
    fn default() -> Self {
        Self { bound_scale: 1.0 }
    }
}

/// A state, either built from parameters or read from a state file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StateConfig {
    Gaussian {
        sigma_x: f64,
        #[serde(default)]
        center_x: f64,
        #[serde(default)]
        center_p: f64,
    },
    Comb {
        period: f64,
        tooth_sigma: f64,
        half_teeth: usize,
        envelope_sigma: f64,
    },
    Random {
        #[serde(default = "default_modes")]
        n_modes: usize,
        #[serde(default = "default_scale")]
        mode_scale: f64,
        seed: u64,
    },
    File {
        path: PathBuf,
    },
}

fn default_modes() -> usize {
    32
}

fn default_scale() -> f64 {
    1.0
}

impl Default for StateConfig {
    fn default() -> Self {
        StateConfig::Gaussian { sigma_x: 1.0, center_x: 0.0, center_p: 0.0 }
    }
}

impl StateConfig {
    /// Built-in specification, or `None` for state files.
    pub fn spec(&self) -> Option<StateSpec> {
        Some(match *self {
            StateConfig::Gaussian { sigma_x, center_x, center_p } => StateSpec::Gaussian { sigma_x, center_x, center_p },
            StateConfig::Comb { period, tooth_sigma, half_teeth, envelope_sigma } => {
                StateSpec::Comb { period, tooth_sigma, half_teeth, envelope_sigma }
            }
            StateConfig::Random { n_modes, mode_scale, seed } => StateSpec::Random { n_modes, mode_scale, seed },
            StateConfig::File { .. } => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyConfig {
    /// Random Hermite–Gauss states checked in addition to the ground Gaussian.
    pub n_states: usize,
    pub n_modes: usize,
    pub lambda_max: f64,
    pub lambda_points: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self { n_states: 100, n_modes: 32, lambda_max: 5.0, lambda_points: 21 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Figure1Config {
    /// Explicit a values; when absent, `points` log-spaced values in [a_min, a_max].
    pub a_values: Option<Vec<f64>>,
    pub a_min: f64,
    pub a_max: f64,
    pub points: usize,
    pub sigma_x: f64,
}

impl Default for Figure1Config {
    fn default() -> Self {
        Self { a_values: None, a_min: 0.01, a_max: 10.0, points: 50, sigma_x: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub state: StateConfig,
    pub lambda_max: f64,
    pub lambda_points: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self { state: StateConfig::default(), lambda_max: 5.0, lambda_points: 21 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MaskShape {
    TopHat { width: f64 },
    Gaussian { sigma: f64 },
    Periodic { period: f64, duty: f64 },
    Tabulated { path: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Response {
    Transmittance,
    Amplitude,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MaskConfig {
    pub shape: MaskShape,
    pub kappa: f64,
    /// Optional phase table (x, φ) for the amplitude response.
    pub phase_path: Option<PathBuf>,
    pub response: Response,
    pub state: StateConfig,
    /// Readout positions; the default grid covers the mask and both densities.
    pub y_min: Option<f64>,
    pub y_max: Option<f64>,
    pub y_points: Option<usize>,
}

impl Default for MaskConfig {
    fn default() -> Self {
        Self {
            shape: MaskShape::TopHat { width: 1.0 },
            kappa: 1.0,
            phase_path: None,
            response: Response::Transmittance,
            state: StateConfig::default(),
            y_min: None,
            y_max: None,
            y_points: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QubitConfig {
    pub state: StateConfig,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub points: usize,
    /// Shots per λ; 0 reports the exact probabilities only.
    pub shots: u64,
}

impl Default for QubitConfig {
    fn default() -> Self {
        Self { state: StateConfig::default(), lambda_min: -5.0, lambda_max: 5.0, points: 21, shots: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FiniteDimConfig {
    pub dimensions: Vec<usize>,
    pub samples: usize,
}

impl Default for FiniteDimConfig {
    fn default() -> Self {
        Self { dimensions: vec![2, 3, 4, 8, 16, 64], samples: 100_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LqcConfig {
    pub q_constant: f64,
    pub lambda_b: Vec<f64>,
    pub state: StateConfig,
}

impl Default for LqcConfig {
    fn default() -> Self {
        Self { q_constant: 1.0, lambda_b: vec![0.1, 1.0, 10.0], state: StateConfig::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TightnessConfig {
    pub gammas: Vec<f64>,
    /// Parameter family; the default is the Gaussian family's standard box.
    pub family: Option<Family>,
    pub split: LambdaSplit,
    pub max_evaluations: usize,
    pub restarts: usize,
}

impl Default for TightnessConfig {
    fn default() -> Self {
        let b = Budget::default();
        Self {
            gammas: vec![0.1, std::f64::consts::FRAC_PI_2, std::f64::consts::PI],
            family: None,
            split: LambdaSplit::Symmetric,
            max_evaluations: b.max_evaluations,
            restarts: b.restarts,
        }
    }
}

/// Flag values that override the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub grid_n: Option<usize>,
    pub grid_length: Option<f64>,
    pub hbar: Option<f64>,
    pub workers: Option<usize>,
    pub self_test: bool,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| anyhow::anyhow!("invalid configuration: {}", e.to_string().trim_end()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read configuration {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(v) = o.seed {
            self.seed = v;
        }
        if let Some(v) = o.grid_n {
            self.grid.n_points = v;
        }
        if let Some(v) = o.grid_length {
            self.grid.length = v;
        }
        if let Some(v) = o.hbar {
            self.grid.hbar = v;
        }
        if let Some(v) = o.workers {
            self.workers = v;
        }
        if o.self_test {
            self.debug.bound_scale = 0.4;
        }
    }

    /// Checks everything that can be checked before any computation.
    pub fn validate(&self) -> Result<()> {
        self.grid.spec()?;
        let t = &self.tolerance;
        for (name, v) in [
            ("tolerance.chur_violation", t.chur_violation),
            ("tolerance.gram", t.gram),
            ("tolerance.transform", t.transform),
            ("tolerance.identity", t.identity),
            ("tolerance.lower_bound", t.lower_bound),
            ("tolerance.mask_relative", t.mask_relative),
            ("tolerance.finite_dim", t.finite_dim),
            ("tolerance.reconstruction", t.reconstruction),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                bail!("{name} must be a non-negative number, got {v}");
            }
        }
        if !(self.debug.bound_scale.is_finite() && self.debug.bound_scale > 0.0) {
            bail!("debug.bound_scale must be positive, got {}", self.debug.bound_scale);
        }
        if !(self.verify.lambda_max.is_finite() && self.verify.lambda_max >= 0.0) || self.verify.lambda_points == 0 {
            bail!("verify.lambda_max must be non-negative and verify.lambda_points positive");
        }
        if !(1..=chur::states::MAX_MODES).contains(&self.verify.n_modes) {
            bail!("verify.n_modes must be in 1..={}", chur::states::MAX_MODES);
        }
        let f = &self.figure1;
        match &f.a_values {
            Some(values) if values.iter().any(|a| !(a.is_finite() && *a >= 0.0)) => bail!("figure1.a_values must be non-negative"),
            None if !(f.a_min > 0.0 && f.a_max >= f.a_min) => bail!("figure1 needs 0 < a_min <= a_max"),
            _ => {}
        }
        if !(f.sigma_x > 0.0) {
            bail!("figure1.sigma_x must be positive");
        }
        if self.sweep.lambda_points == 0 || !(self.sweep.lambda_max >= 0.0) {
            bail!("sweep.lambda_max must be non-negative and sweep.lambda_points positive");
        }
        let m = &self.mask;
        if !(m.kappa.is_finite() && m.kappa > 0.0) {
            bail!("mask.kappa must be positive, got {}", m.kappa);
        }
        match (m.y_min, m.y_max, m.y_points) {
            (None, None, None) => {}
            (Some(lo), Some(hi), Some(n)) if lo <= hi && n > 0 => {}
            _ => bail!("mask.y_min, mask.y_max and mask.y_points must be given together with y_min <= y_max"),
        }
        if self.qubit.points == 0 || self.qubit.lambda_min > self.qubit.lambda_max {
            bail!("qubit needs points > 0 and lambda_min <= lambda_max");
        }
        if self.qubit.shots == 1 {
            bail!("qubit.shots must be 0 (exact) or at least 2");
        }
        if self.finite_dim.dimensions.iter().any(|d| *d < 2) || self.finite_dim.samples == 0 {
            bail!("finite_dim.dimensions must all be >= 2 and finite_dim.samples positive");
        }
        if !(self.lqc.q_constant > 0.0) || self.lqc.lambda_b.iter().any(|l| !(*l > 0.0)) {
            bail!("lqc.q_constant and every lqc.lambda_b must be positive");
        }
        if self.tightness.restarts == 0 || self.tightness.max_evaluations == 0 {
            bail!("tightness.restarts and tightness.max_evaluations must be positive");
        }
        if self.tightness.gammas.iter().any(|g| !g.is_finite()) {
            bail!("tightness.gammas must be finite");
        }
        Ok(())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }
}

//! Gaussian packets, Gaussian combs, and seeded Hermite–Gauss superpositions.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{ChurError, Result};
use crate::grid::{GridSpec, StateVector};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianSpec {
    pub sigma_x: f64,
    #[serde(default)]
    pub center_x: f64,
    #[serde(default)]
    pub center_p: f64,
}

impl GaussianSpec {
    pub fn ground(sigma_x: f64) -> Self {
        Self { sigma_x, center_x: 0.0, center_p: 0.0 }
    }
}

/// Normalized Gaussian with position standard deviation `sigma_x`, centered
/// at `center_x` and boosted by e^{i center_p x/ħ}.
pub fn make_gaussian(spec: &GaussianSpec, grid: &GridSpec) -> Result<StateVector> {
    let GaussianSpec { sigma_x, center_x, center_p } = *spec;
    if !(sigma_x.is_finite() && sigma_x > 0.0) {
        return Err(ChurError::InvalidParameter(format!("sigma_x must be positive, got {sigma_x}")));
    }
    if 8.0 * sigma_x + (center_x - grid.center()).abs() >= 0.5 * grid.length() {
        return Err(ChurError::GridTooSmall(format!(
            "gaussian with sigma_x={sigma_x} at {center_x} does not fit a window of length {}",
            grid.length()
        )));
    }
    let sigma_p = 0.5 * grid.hbar() / sigma_x;
    if 8.0 * sigma_p + center_p.abs() >= grid.p_max() {
        return Err(ChurError::GridTooSmall(format!(
            "momentum width {sigma_p} at {center_p} exceeds the momentum window ±{}",
            grid.p_max()
        )));
    }
    let inv = 1.0 / (4.0 * sigma_x * sigma_x);
    let amps = grid
        .positions()
        .map(|x| Complex64::from_polar((-(x - center_x).powi(2) * inv).exp(), center_p * x / grid.hbar()))
        .collect();
    StateVector::normalized(*grid, amps)
}

/// Gaussian teeth of width `tooth_sigma` every `period`, weighted by a
/// Gaussian envelope of width `envelope_sigma`, for k = −K..K.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CombSpec {
    pub period: f64,
    pub tooth_sigma: f64,
    pub half_teeth: usize,
    pub envelope_sigma: f64,
}

impl CombSpec {
    /// Extent required on the grid, (2K+1)T + 8W.
    pub fn footprint(&self) -> f64 {
        (2 * self.half_teeth + 1) as f64 * self.period + 8.0 * self.envelope_sigma
    }
}

/// ψ ∝ Σ_k e^{−(kT)²/(2W²)} e^{−(x − kT)²/(2w²)}, centered on the grid center.
pub fn make_comb(spec: &CombSpec, grid: &GridSpec) -> Result<StateVector> {
    let CombSpec { period, tooth_sigma, half_teeth, envelope_sigma } = *spec;
    for (name, v) in [("period", period), ("tooth_sigma", tooth_sigma), ("envelope_sigma", envelope_sigma)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(ChurError::InvalidParameter(format!("{name} must be positive, got {v}")));
        }
    }
    if spec.footprint() >= grid.length() {
        return Err(ChurError::GridTooSmall(format!(
            "comb footprint {} does not fit a window of length {}",
            spec.footprint(),
            grid.length()
        )));
    }
    let limit = 2.0 * grid.dx();
    if tooth_sigma <= limit {
        return Err(ChurError::TeethUnresolved { tooth_sigma, limit });
    }
    let n = grid.n_points();
    let dx = grid.dx();
    let reach = 12.0 * tooth_sigma;
    let mut amps = vec![Complex64::new(0.0, 0.0); n];
    let k = half_teeth as i64;
    for t in -k..=k {
        let c = grid.center() + t as f64 * period;
        let weight = (-(t as f64 * period).powi(2) / (2.0 * envelope_sigma * envelope_sigma)).exp();
        let lo = (((c - reach - grid.x_min()) / dx).floor().max(0.0)) as usize;
        let hi = ((((c + reach - grid.x_min()) / dx).ceil()) as usize).min(n - 1);
        for (j, a) in amps.iter_mut().enumerate().take(hi + 1).skip(lo) {
            let d = grid.x(j) - c;
            a.re += weight * (-d * d / (2.0 * tooth_sigma * tooth_sigma)).exp();
        }
    }
    StateVector::normalized(*grid, amps)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RandomStateSpec {
    #[serde(default = "default_modes")]
    pub n_modes: usize,
    #[serde(default = "default_scale")]
    pub mode_scale: f64,
    pub seed: u64,
}

fn default_modes() -> usize {
    32
}

fn default_scale() -> f64 {
    1.0
}

impl RandomStateSpec {
    pub fn new(seed: u64) -> Self {
        Self { n_modes: default_modes(), mode_scale: default_scale(), seed }
    }
}

pub const MAX_MODES: usize = 128;

/// Hermite–Gauss functions φ_n(x/s)/√s for n < `n_modes`, sampled on the grid.
/// Row n holds mode n.
pub fn hermite_gauss_modes(grid: &GridSpec, n_modes: usize, scale: f64) -> Vec<Vec<f64>> {
    let mut modes = vec![vec![0.0; grid.n_points()]; n_modes];
    let norm = PI.powf(-0.25) / scale.sqrt();
    for (j, x) in grid.positions().enumerate() {
        let xi = (x - grid.center()) / scale;
        let mut prev = 0.0;
        let mut cur = norm * (-0.5 * xi * xi).exp();
        for (n, mode) in modes.iter_mut().enumerate() {
            mode[j] = cur;
            let nf = n as f64;
            let next = (2.0 / (nf + 1.0)).sqrt() * xi * cur - (nf / (nf + 1.0)).sqrt() * prev;
            prev = cur;
            cur = next;
        }
    }
    modes
}

/// Normalized superposition of the first `n_modes` Hermite–Gauss functions
/// with complex standard-normal coefficients drawn from a ChaCha8 stream
/// seeded by `seed`.
pub fn make_random(spec: &RandomStateSpec, grid: &GridSpec) -> Result<StateVector> {
    if spec.n_modes == 0 || spec.n_modes > MAX_MODES {
        return Err(ChurError::InvalidParameter(format!("n_modes must be in 1..={MAX_MODES}, got {}", spec.n_modes)));
    }
    if !(spec.mode_scale.is_finite() && spec.mode_scale > 0.0) {
        return Err(ChurError::InvalidParameter(format!("mode_scale must be positive, got {}", spec.mode_scale)));
    }
    let coeffs = random_coefficients(spec.n_modes, spec.seed);
    let modes = hermite_gauss_modes(grid, spec.n_modes, spec.mode_scale);
    let mut amps = vec![Complex64::new(0.0, 0.0); grid.n_points()];
    for (c, mode) in coeffs.iter().zip(&modes) {
        for (a, m) in amps.iter_mut().zip(mode) {
            *a += c * m;
        }
    }
    StateVector::normalized(*grid, amps)
}

/// Complex coefficients (N(0,1) + i N(0,1))/√2 from the seeded stream.
pub fn random_coefficients(n: usize, seed: u64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
        })
        .collect()
}

/// Configuration-level description of a state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StateSpec {
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
}

impl StateSpec {
    pub fn build(&self, grid: &GridSpec) -> Result<StateVector> {
        match *self {
            StateSpec::Gaussian { sigma_x, center_x, center_p } => {
                make_gaussian(&GaussianSpec { sigma_x, center_x, center_p }, grid)
            }
            StateSpec::Comb { period, tooth_sigma, half_teeth, envelope_sigma } => {
                make_comb(&CombSpec { period, tooth_sigma, half_teeth, envelope_sigma }, grid)
            }
            StateSpec::Random { n_modes, mode_scale, seed } => {
                make_random(&RandomStateSpec { n_modes, mode_scale, seed }, grid)
            }
        }
    }
}

//! Uniform periodic grids and the pure/mixed states that live on them.
//!
//! Position samples are `x_j = center − length/2 + j·dx` and momentum samples
//! are `p_k = (k − n/2)·dp` with `dp = 2πħ/length`, so `dx·dp·n = 2πħ`. The
//! discrete transform
//!
//! ψ̃(p_k) = dx/√(2πħ) · Σ_j e^{−i p_k x_j/ħ} ψ(x_j)
//!
//! is exactly unitary between the two grids.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{ChurError, Result};
use crate::fft;
use crate::tolerance;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    n_points: usize,
    length: f64,
    hbar: f64,
    center: f64,
}

impl GridSpec {
    pub fn new(n_points: usize, length: f64, hbar: f64, center: f64) -> Result<Self> {
        if n_points < 4 || !n_points.is_multiple_of(2) {
            return Err(ChurError::InvalidGrid(format!(
                "n_points must be even and at least 4, got {n_points}"
            )));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(ChurError::InvalidGrid(format!("length must be positive, got {length}")));
        }
        if !(hbar.is_finite() && hbar > 0.0) {
            return Err(ChurError::InvalidGrid(format!("hbar must be positive, got {hbar}")));
        }
        if !center.is_finite() {
            return Err(ChurError::InvalidGrid("center must be finite".into()));
        }
        Ok(Self { n_points, length, hbar, center })
    }

    /// The default test grid: 4096 points over 40 units, ħ = 1, centered at 0.
    pub fn standard() -> Self {
        Self { n_points: 4096, length: 40.0, hbar: 1.0, center: 0.0 }
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn dx(&self) -> f64 {
        self.length / self.n_points as f64
    }

    pub fn dp(&self) -> f64 {
        2.0 * PI * self.hbar / self.length
    }

    pub fn x_min(&self) -> f64 {
        self.center - 0.5 * self.length
    }

    pub fn x(&self, j: usize) -> f64 {
        self.x_min() + j as f64 * self.dx()
    }

    pub fn p(&self, k: usize) -> f64 {
        (k as f64 - (self.n_points / 2) as f64) * self.dp()
    }

    pub fn positions(&self) -> impl Iterator<Item = f64> + Clone + '_ {
        (0..self.n_points).map(move |j| self.x(j))
    }

    pub fn momenta(&self) -> impl Iterator<Item = f64> + Clone + '_ {
        (0..self.n_points).map(move |k| self.p(k))
    }

    /// Largest |p| on the momentum grid.
    pub fn p_max(&self) -> f64 {
        (self.n_points / 2) as f64 * self.dp()
    }

    /// Largest admissible translation (a quarter of the window).
    pub fn max_shift(&self) -> f64 {
        0.25 * self.length
    }

    /// Same sampling with a different action constant.
    pub fn with_hbar(&self, hbar: f64) -> Result<Self> {
        Self::new(self.n_points, self.length, hbar, self.center)
    }
}

/// Which conjugate representation a quantity refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Representation {
    Position,
    Momentum,
}

impl Representation {
    pub fn name(self) -> &'static str {
        match self {
            Representation::Position => "position",
            Representation::Momentum => "momentum",
        }
    }
}

/// Normalized position-space amplitudes of a pure state.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    grid: GridSpec,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// Wraps amplitudes that must already satisfy Σ|ψ|²·dx = 1 within 1e-12.
    pub fn new(grid: GridSpec, amplitudes: Vec<Complex64>) -> Result<Self> {
        check_len(&grid, amplitudes.len())?;
        let norm = squared_norm(&amplitudes, grid.dx());
        if (norm - 1.0).abs() > tolerance::IDENTITY {
            return Err(ChurError::NotNormalized(norm));
        }
        Ok(Self { grid, amplitudes })
    }

    /// Rescales arbitrary nonzero amplitudes to unit norm.
    pub fn normalized(grid: GridSpec, mut amplitudes: Vec<Complex64>) -> Result<Self> {
        check_len(&grid, amplitudes.len())?;
        let norm = squared_norm(&amplitudes, grid.dx());
        if !(norm.is_finite() && norm > 0.0) {
            return Err(ChurError::NotNormalized(norm));
        }
        let scale = norm.sqrt().recip();
        amplitudes.iter_mut().for_each(|a| *a *= scale);
        Ok(Self { grid, amplitudes })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn norm_squared(&self) -> f64 {
        squared_norm(&self.amplitudes, self.grid.dx())
    }

    /// Position density ρ(x_j) = |ψ(x_j)|².
    pub fn density(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Ratio of the largest |ψ| on the outermost 1% of samples (both ends) to
    /// the peak |ψ|.
    pub fn boundary_ratio(&self) -> f64 {
        boundary_ratio(&self.amplitudes)
    }

    /// Boundary confinement in both representations below 1e-12 of the peak.
    pub fn is_confined(&self) -> bool {
        self.boundary_ratio() < tolerance::IDENTITY
            && to_momentum(self).boundary_ratio() < tolerance::IDENTITY
    }

    /// ⟨ψ|φ⟩ = Σ conj(ψ_j) φ_j dx.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.grid != other.grid {
            return Err(ChurError::GridMismatch);
        }
        Ok(inner(&self.amplitudes, &other.amplitudes, self.grid.dx()))
    }

    /// Same amplitudes reinterpreted under a different action constant. The
    /// momentum grid rescales accordingly.
    pub fn with_hbar(&self, hbar: f64) -> Result<StateVector> {
        Ok(StateVector { grid: self.grid.with_hbar(hbar)?, amplitudes: self.amplitudes.clone() })
    }
}

/// Momentum-space amplitudes ψ̃(p_k) on the grid's momentum samples.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumVector {
    grid: GridSpec,
    amplitudes: Vec<Complex64>,
}

impl MomentumVector {
    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_squared(&self) -> f64 {
        squared_norm(&self.amplitudes, self.grid.dp())
    }

    pub fn density(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn boundary_ratio(&self) -> f64 {
        boundary_ratio(&self.amplitudes)
    }
}

/// Convex combination of pure states on a shared grid.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedState {
    components: Vec<(f64, StateVector)>,
}

impl MixedState {
    pub fn new(components: Vec<(f64, StateVector)>) -> Result<Self> {
        let Some((_, first)) = components.first() else {
            return Err(ChurError::InvalidMixture("no components".into()));
        };
        let grid = *first.grid();
        let mut total = 0.0;
        for (w, s) in &components {
            if !(*w > 0.0 && *w <= 1.0) {
                return Err(ChurError::InvalidMixture(format!("weight {w} outside (0, 1]")));
            }
            if *s.grid() != grid {
                return Err(ChurError::GridMismatch);
            }
            total += w;
        }
        if (total - 1.0).abs() > tolerance::IDENTITY {
            return Err(ChurError::InvalidMixture(format!("weights sum to {total}")));
        }
        Ok(Self { components })
    }

    pub fn components(&self) -> &[(f64, StateVector)] {
        &self.components
    }

    pub fn grid(&self) -> &GridSpec {
        self.components[0].1.grid()
    }

    pub fn position_density(&self) -> Vec<f64> {
        self.weighted(|s| s.density())
    }

    pub fn momentum_density(&self) -> Vec<f64> {
        self.weighted(|s| to_momentum(s).density())
    }

    fn weighted(&self, f: impl Fn(&StateVector) -> Vec<f64>) -> Vec<f64> {
        let mut acc = vec![0.0; self.grid().n_points()];
        for (w, s) in &self.components {
            for (a, d) in acc.iter_mut().zip(f(s)) {
                *a += w * d;
            }
        }
        acc
    }
}

/// Unitary transform to the momentum representation.
pub fn to_momentum(state: &StateVector) -> MomentumVector {
    let grid = state.grid;
    let n = grid.n_points;
    let mut buf: Vec<Complex64> = state
        .amplitudes
        .iter()
        .enumerate()
        .map(|(j, a)| if j % 2 == 0 { *a } else { -*a })
        .collect();
    fft::forward(&mut buf);
    let pref = grid.dx() / (2.0 * PI * grid.hbar).sqrt();
    let x0 = grid.x_min();
    for (k, c) in buf.iter_mut().enumerate().take(n) {
        *c *= Complex64::from_polar(pref, -grid.p(k) * x0 / grid.hbar);
    }
    MomentumVector { grid, amplitudes: buf }
}

/// Inverse of [`to_momentum`].
pub fn to_position(momentum: &MomentumVector) -> StateVector {
    let grid = momentum.grid;
    let x0 = grid.x_min();
    let mut buf: Vec<Complex64> = momentum
        .amplitudes
        .iter()
        .enumerate()
        .map(|(k, a)| a * Complex64::from_polar(1.0, grid.p(k) * x0 / grid.hbar))
        .collect();
    fft::inverse(&mut buf);
    let pref = grid.dp() / (2.0 * PI * grid.hbar).sqrt();
    for (j, c) in buf.iter_mut().enumerate() {
        *c *= if j % 2 == 0 { pref } else { -pref };
    }
    StateVector { grid, amplitudes: buf }
}

/// ψ ↦ ψ(x + shift), i.e. the action of e^{i (shift/ħ) p̂}, realized as a
/// phase ramp on the momentum representation.
pub fn translate(state: &StateVector, shift: f64) -> Result<StateVector> {
    let grid = state.grid;
    check_shift(&grid, shift)?;
    if shift == 0.0 {
        return Ok(state.clone());
    }
    let mut mom = to_momentum(state);
    apply_translation_phase(&mut mom, shift);
    Ok(to_position(&mom))
}

/// Translation of an already transformed state; avoids a second forward
/// transform when many shifts of one state are needed.
pub fn translate_momentum(momentum: &MomentumVector, shift: f64) -> Result<StateVector> {
    check_shift(&momentum.grid, shift)?;
    let mut mom = momentum.clone();
    apply_translation_phase(&mut mom, shift);
    Ok(to_position(&mom))
}

fn apply_translation_phase(mom: &mut MomentumVector, shift: f64) {
    let grid = mom.grid;
    for (k, c) in mom.amplitudes.iter_mut().enumerate() {
        *c *= Complex64::from_polar(1.0, grid.p(k) * shift / grid.hbar);
    }
}

pub(crate) fn check_shift(grid: &GridSpec, shift: f64) -> Result<()> {
    let limit = grid.max_shift();
    if !shift.is_finite() || shift.abs() >= limit {
        return Err(ChurError::ShiftTooLarge { shift, limit });
    }
    Ok(())
}

/// First two moments of a density sampled on a uniform grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub mean: f64,
    pub variance: f64,
}

pub fn moments(samples: impl Iterator<Item = f64> + Clone, density: &[f64], step: f64) -> Moments {
    let mass: f64 = density.iter().sum::<f64>() * step;
    let mean = samples.clone().zip(density).map(|(x, r)| x * r).sum::<f64>() * step / mass;
    let variance = samples.zip(density).map(|(x, r)| (x - mean).powi(2) * r).sum::<f64>() * step / mass;
    Moments { mean, variance }
}

pub fn position_moments(state: &StateVector) -> Moments {
    moments(state.grid.positions(), &state.density(), state.grid.dx())
}

pub fn momentum_moments(state: &StateVector) -> Moments {
    let mom = to_momentum(state);
    moments(state.grid.momenta(), &mom.density(), state.grid.dp())
}

/// Quadrature second central moment of the density in the requested representation.
pub fn variance(state: &StateVector, representation: Representation) -> f64 {
    match representation {
        Representation::Position => position_moments(state).variance,
        Representation::Momentum => momentum_moments(state).variance,
    }
}

/// Moments of a mixture's density.
pub fn mixed_moments(state: &MixedState, representation: Representation) -> Moments {
    let grid = state.grid();
    match representation {
        Representation::Position => moments(grid.positions(), &state.position_density(), grid.dx()),
        Representation::Momentum => moments(grid.momenta(), &state.momentum_density(), grid.dp()),
    }
}

/// Variance of a mixture's density.
pub fn mixed_variance(state: &MixedState, representation: Representation) -> f64 {
    mixed_moments(state, representation).variance
}

/// Symmetrized position–momentum covariance Re⟨x̂p̂⟩ − ⟨x̂⟩⟨p̂⟩.
pub fn covariance(state: &StateVector) -> f64 {
    let grid = state.grid;
    let mut mom = to_momentum(state);
    for (k, c) in mom.amplitudes.iter_mut().enumerate() {
        *c *= grid.p(k);
    }
    let p_psi = to_position(&mom);
    let x_mean = position_moments(state).mean;
    let p_mean = momentum_moments(state).mean;
    let xp: Complex64 = state
        .amplitudes
        .iter()
        .zip(&p_psi.amplitudes)
        .enumerate()
        .map(|(j, (a, b))| a.conj() * grid.x(j) * b)
        .sum::<Complex64>()
        * grid.dx();
    xp.re - x_mean * p_mean
}

pub(crate) fn inner(a: &[Complex64], b: &[Complex64], step: f64) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum::<Complex64>() * step
}

fn squared_norm(a: &[Complex64], step: f64) -> f64 {
    a.iter().map(|c| c.norm_sqr()).sum::<f64>() * step
}

fn boundary_ratio(a: &[Complex64]) -> f64 {
    let n = a.len();
    let edge = (n / 100).max(1);
    let peak = a.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if peak == 0.0 {
        return 0.0;
    }
    let outer = a[..edge].iter().chain(&a[n - edge..]).map(|c| c.norm()).fold(0.0, f64::max);
    outer / peak
}

fn check_len(grid: &GridSpec, len: usize) -> Result<()> {
    if len != grid.n_points {
        return Err(ChurError::LengthMismatch { expected: grid.n_points, got: len });
    }
    Ok(())
}

//! Characteristic functions of the position and momentum densities.
//!
//! Φ(λ) = Σ_j e^{iλ x_j} ρ(x_j) dx is a plain Riemann sum; for densities that
//! vanish at the window edges it is spectrally accurate. Negative λ is
//! evaluated as the conjugate of +|λ| so Φ(−λ) = Φ(λ)* holds bit for bit.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{ChurError, Result};
use crate::fft;
use crate::grid::{self, GridSpec, MixedState, MomentumVector, Representation, StateVector};
use crate::tolerance;

/// Anything with a position and a momentum density.
pub trait CharSource {
    fn grid(&self) -> &GridSpec;
    fn char_position(&self, lambda_x: f64) -> Complex64;
    fn char_momentum(&self, lambda_p: f64) -> Complex64;
    fn moments(&self, representation: Representation) -> grid::Moments;

    fn variance(&self, representation: Representation) -> f64 {
        self.moments(representation).variance
    }
}

impl CharSource for StateVector {
    fn grid(&self) -> &GridSpec {
        StateVector::grid(self)
    }

    fn char_position(&self, lambda_x: f64) -> Complex64 {
        let g = StateVector::grid(self);
        char_of_density(g.positions(), &self.density(), g.dx(), lambda_x)
    }

    fn char_momentum(&self, lambda_p: f64) -> Complex64 {
        char_momentum_of(&grid::to_momentum(self), lambda_p)
    }

    fn moments(&self, representation: Representation) -> grid::Moments {
        match representation {
            Representation::Position => grid::position_moments(self),
            Representation::Momentum => grid::momentum_moments(self),
        }
    }
}

impl CharSource for MixedState {
    fn grid(&self) -> &GridSpec {
        MixedState::grid(self)
    }

    fn char_position(&self, lambda_x: f64) -> Complex64 {
        self.components().iter().map(|(w, s)| *w * s.char_position(lambda_x)).sum()
    }

    fn char_momentum(&self, lambda_p: f64) -> Complex64 {
        self.components().iter().map(|(w, s)| *w * s.char_momentum(lambda_p)).sum()
    }

    fn moments(&self, representation: Representation) -> grid::Moments {
        grid::mixed_moments(self, representation)
    }
}

/// One point of a characteristic-function sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CharFunctionSample {
    pub lambda: f64,
    pub value: Complex64,
}

/// Flat record `lambda, re, im, abs`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CharFunctionRecord {
    pub lambda: f64,
    pub re: f64,
    pub im: f64,
    pub abs: f64,
}

impl From<CharFunctionSample> for CharFunctionRecord {
    fn from(s: CharFunctionSample) -> Self {
        Self { lambda: s.lambda, re: s.value.re, im: s.value.im, abs: s.value.norm() }
    }
}

/// Ω together with its arguments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DisplacementExpectation {
    pub lambda_x: f64,
    pub lambda_p: f64,
    pub omega: Complex64,
}

pub fn char_position<S: CharSource + ?Sized>(state: &S, lambda_x: f64) -> Complex64 {
    state.char_position(lambda_x)
}

pub fn char_momentum<S: CharSource + ?Sized>(state: &S, lambda_p: f64) -> Complex64 {
    state.char_momentum(lambda_p)
}

/// Φ̃(λp) from precomputed momentum amplitudes.
pub fn char_momentum_of(momentum: &MomentumVector, lambda_p: f64) -> Complex64 {
    let g = momentum.grid();
    char_of_density(g.momenta(), &momentum.density(), g.dp(), lambda_p)
}

/// Σ_j e^{iλ u_j} ρ_j step, with exact Hermiticity in λ.
pub fn char_of_density(samples: impl Iterator<Item = f64>, density: &[f64], step: f64, lambda: f64) -> Complex64 {
    if lambda == 0.0 {
        return Complex64::new(density.iter().sum::<f64>() * step, 0.0);
    }
    let l = lambda.abs();
    let (mut re, mut im) = (0.0, 0.0);
    for (u, r) in samples.zip(density) {
        let (s, c) = (l * u).sin_cos();
        re += c * r;
        im += s * r;
    }
    let v = Complex64::new(re * step, im * step);
    if lambda < 0.0 {
        v.conj()
    } else {
        v
    }
}

/// Sweep of the characteristic function over `lambdas`.
pub fn char_sweep<S: CharSource + ?Sized>(state: &S, representation: Representation, lambdas: &[f64]) -> Vec<CharFunctionSample> {
    lambdas
        .iter()
        .map(|&lambda| {
            let value = match representation {
                Representation::Position => state.char_position(lambda),
                Representation::Momentum => state.char_momentum(lambda),
            };
            CharFunctionSample { lambda, value }
        })
        .collect()
}

/// Φ(λx) as the autocorrelation ∫ψ̃*(p) ψ̃(p − ħλx) dp of the momentum wave
/// function. The shifted copy is the band-limited interpolant of ψ̃ on the
/// momentum grid, so this route shares nothing with the position-space sum
/// beyond the forward transform.
pub fn char_momentum_autocorr(state: &StateVector, lambda_x: f64) -> Result<Complex64> {
    let g = *state.grid();
    let shift = g.hbar() * lambda_x;
    let limit = 0.25 * g.n_points() as f64 * g.dp();
    if !shift.is_finite() || shift.abs() >= limit {
        return Err(ChurError::ShiftTooLarge { shift, limit });
    }
    let mom = grid::to_momentum(state);
    let shifted = fft::spectral_shift(mom.amplitudes(), g.dp(), -shift);
    Ok(grid::inner(mom.amplitudes(), &shifted, g.dp()))
}

/// Ω = ⟨ψ| e^{−iλx x̂} e^{iλp p̂} |ψ⟩ = Σ_j ψ*(x_j) e^{−iλx x_j} ψ(x_j + ħλp) dx.
pub fn displacement_expectation(state: &StateVector, lambda_x: f64, lambda_p: f64) -> Result<Complex64> {
    let g = *state.grid();
    let shifted = grid::translate(state, g.hbar() * lambda_p)?;
    Ok(omega_from_shifted(state, &shifted, lambda_x))
}

pub(crate) fn omega_from_shifted(state: &StateVector, shifted: &StateVector, lambda_x: f64) -> Complex64 {
    let g = state.grid();
    state
        .amplitudes()
        .iter()
        .zip(shifted.amplitudes())
        .enumerate()
        .map(|(j, (a, b))| a.conj() * Complex64::from_polar(1.0, -lambda_x * g.x(j)) * b)
        .sum::<Complex64>()
        * g.dx()
}

pub fn displacement(state: &StateVector, lambda_x: f64, lambda_p: f64) -> Result<DisplacementExpectation> {
    Ok(DisplacementExpectation { lambda_x, lambda_p, omega: displacement_expectation(state, lambda_x, lambda_p)? })
}

/// Outcome of |Φ(λ)| ≥ Re(e^{−iλμ}Φ(λ)) ≥ 1 − λ²σ²/2.
///
/// The middle term is the characteristic function of the centered density.
/// For a density with mean zero it is Re Φ itself; otherwise Re Φ can dip
/// below the variance bound at small λ, since the uncentered version needs
/// the second moment in place of σ².
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LowerBoundCheck {
    pub re_phi: f64,
    pub centered_re_phi: f64,
    pub bound: f64,
    pub holds: bool,
}

pub fn lower_bound_check<S: CharSource + ?Sized>(state: &S, lambda: f64, representation: Representation) -> LowerBoundCheck {
    let phi = match representation {
        Representation::Position => state.char_position(lambda),
        Representation::Momentum => state.char_momentum(lambda),
    };
    let m = state.moments(representation);
    let centered = (phi * Complex64::from_polar(1.0, -lambda * m.mean)).re;
    let c = lower_bound_from(centered, m.variance, lambda);
    LowerBoundCheck { re_phi: phi.re, ..c }
}

/// Checks a given real part against 1 − λ²σ²/2.
pub fn lower_bound_from(re_phi: f64, variance: f64, lambda: f64) -> LowerBoundCheck {
    let bound = 1.0 - 0.5 * lambda * lambda * variance;
    LowerBoundCheck { re_phi, centered_re_phi: re_phi, bound, holds: re_phi >= bound - tolerance::LOWER_BOUND }
}

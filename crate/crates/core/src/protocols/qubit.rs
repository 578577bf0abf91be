//! Ancilla-assisted readout of Φ̃(λp).
//!
//! The ancilla starts in |+⟩ and controls D = e^{iλp p̂}. With the joint state
//! (|0⟩ψ + |1⟩Dψ)/√2, projecting the ancilla on ⟨b| = (⟨0| + c̄⟨1|)/√2 leaves
//! the system in (ψ + c̄ Dψ)/2, whose squared norm is the outcome probability.
//! With |±i⟩ = (|0⟩ ± i|1⟩)/√2 this gives P±i = ½(1 ± Im⟨D⟩), so
//! ⟨D⟩ = (P+ − P−) + i(P+i − P−i).

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::Serialize;

use crate::error::{ChurError, Result};
use crate::grid::{self, StateVector};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QubitReadout {
    pub lambda_p: f64,
    pub p_plus: f64,
    pub p_minus: f64,
    pub p_plus_i: f64,
    pub p_minus_i: f64,
    pub reconstructed: Complex64,
}

impl QubitReadout {
    fn from_probabilities(lambda_p: f64, p_plus: f64, p_minus: f64, p_plus_i: f64, p_minus_i: f64) -> Self {
        Self {
            lambda_p,
            p_plus,
            p_minus,
            p_plus_i,
            p_minus_i,
            reconstructed: Complex64::new(p_plus - p_minus, p_plus_i - p_minus_i),
        }
    }
}

/// Probability of the ancilla outcome ⟨b| = (⟨0| + c̄⟨1|)/√2.
fn outcome_probability(psi: &[Complex64], d_psi: &[Complex64], c: Complex64, dx: f64) -> f64 {
    psi.iter().zip(d_psi).map(|(a, b)| (0.5 * (a + c.conj() * b)).norm_sqr()).sum::<f64>() * dx
}

pub fn qubit_exact(state: &StateVector, lambda_p: f64) -> Result<QubitReadout> {
    let g = state.grid();
    if lambda_p == 0.0 {
        return Ok(QubitReadout::from_probabilities(0.0, 1.0, 0.0, 0.5, 0.5));
    }
    let displaced = grid::translate(state, g.hbar() * lambda_p)?;
    let (psi, d_psi) = (state.amplitudes(), displaced.amplitudes());
    let dx = g.dx();
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    let p_plus = outcome_probability(psi, d_psi, one, dx);
    let p_minus = outcome_probability(psi, d_psi, -one, dx);
    let p_plus_i = outcome_probability(psi, d_psi, i, dx);
    let p_minus_i = outcome_probability(psi, d_psi, -i, dx);
    // the four values share the norm ‖ψ‖² = 1 up to rounding; renormalize each basis
    let (sx, sy) = (p_plus + p_minus, p_plus_i + p_minus_i);
    Ok(QubitReadout::from_probabilities(lambda_p, p_plus / sx, p_minus / sx, p_plus_i / sy, p_minus_i / sy))
}

/// Finite-shot estimate with its per-quadrature standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SampledReadout {
    pub estimate: QubitReadout,
    pub exact: QubitReadout,
    pub shots: u64,
    pub counts_plus: u64,
    pub counts_plus_i: u64,
    /// Standard error of Re and Im of the estimate.
    pub stderr_re: f64,
    pub stderr_im: f64,
}

/// Splits `shots` between the σx and σy bases (the σx basis takes the odd
/// shot) and draws binomial outcome counts.
pub fn qubit_sampled(state: &StateVector, lambda_p: f64, shots: u64, seed: u64) -> Result<SampledReadout> {
    if shots < 2 {
        return Err(ChurError::InvalidShots);
    }
    let exact = qubit_exact(state, lambda_p)?;
    let n_x = shots - shots / 2;
    let n_y = shots / 2;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = |n: u64, p: f64, rng: &mut ChaCha8Rng| -> u64 {
        Binomial::new(n, p.clamp(0.0, 1.0)).expect("probability in [0, 1]").sample(rng)
    };
    let counts_plus = draw(n_x, exact.p_plus, &mut rng);
    let counts_plus_i = draw(n_y, exact.p_plus_i, &mut rng);
    let fx = counts_plus as f64 / n_x as f64;
    let fy = counts_plus_i as f64 / n_y as f64;
    let estimate = QubitReadout::from_probabilities(lambda_p, fx, 1.0 - fx, fy, 1.0 - fy);
    // Re = 2f − 1, so its standard error is twice that of f
    let stderr_re = 2.0 * (fx * (1.0 - fx) / n_x as f64).sqrt();
    let stderr_im = 2.0 * (fy * (1.0 - fy) / n_y as f64).sqrt();
    Ok(SampledReadout { estimate, exact, shots, counts_plus, counts_plus_i, stderr_re, stderr_im })
}

/// One `lambda_p, p_plus, p_minus, p_plus_i, p_minus_i, re_est, im_est, stderr` row.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QubitRecord {
    pub lambda_p: f64,
    pub p_plus: f64,
    pub p_minus: f64,
    pub p_plus_i: f64,
    pub p_minus_i: f64,
    pub re_est: f64,
    pub im_est: f64,
    pub stderr: f64,
}

impl From<&QubitReadout> for QubitRecord {
    fn from(r: &QubitReadout) -> Self {
        Self {
            lambda_p: r.lambda_p,
            p_plus: r.p_plus,
            p_minus: r.p_minus,
            p_plus_i: r.p_plus_i,
            p_minus_i: r.p_minus_i,
            re_est: r.reconstructed.re,
            im_est: r.reconstructed.im,
            stderr: 0.0,
        }
    }
}

impl From<&SampledReadout> for QubitRecord {
    fn from(s: &SampledReadout) -> Self {
        Self { stderr: s.stderr_re.hypot(s.stderr_im), ..QubitRecord::from(&s.estimate) }
    }
}

//! Volume fluctuations bounded by the holonomy expectation.
//!
//! V and b are conjugate with constant ħQ. Choosing λ_V = π/(ħQλ_b) makes
//! B = 1, so |⟨U_b⟩|² ≤ 1 − |Φ_V(λ_V)|², and the lower bound on Re Φ_V turns
//! this into σ_V ≥ (ħQ/π) λ_b |⟨U_b(λ_b)⟩|.

use std::f64::consts::PI;

use serde::Serialize;

use crate::charfunc::{char_momentum, char_position};
use crate::chur;
use crate::error::{ChurError, Result};
use crate::grid::{self, Representation, StateVector};
use crate::tolerance;

#[derive(Debug, Clone, PartialEq)]
pub struct LqcScenario {
    /// Q = 4πG/c² in the chosen units.
    pub q_constant: f64,
    pub lambda_b: f64,
    /// Toy state in the volume representation; its grid's ħ is the bare ħ.
    pub state_v: StateVector,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LqcReport {
    pub lambda_b: f64,
    pub lambda_v: f64,
    pub sigma_v: f64,
    pub abs_u_b: f64,
    /// (ħQ/π) λ_b |⟨U_b⟩|.
    pub rhs: f64,
    pub holds: bool,
    /// B(ħQ λ_V λ_b), equal to 1.
    pub bound_at_pi: f64,
    pub abs_phi_v: f64,
    /// |⟨U_b⟩|² ≤ 1 − |Φ_V(λ_V)|².
    pub intermediate_holds: bool,
}

pub fn lqc_bound_check(scenario: &LqcScenario) -> Result<LqcReport> {
    let LqcScenario { q_constant, lambda_b, ref state_v } = *scenario;
    if !(q_constant > 0.0 && lambda_b > 0.0) {
        return Err(ChurError::InvalidParameter("Q and λ_b must be positive".into()));
    }
    let hbar_q = state_v.grid().hbar() * q_constant;
    let state = state_v.with_hbar(hbar_q)?;
    let var_v = grid::variance(&state, Representation::Position);
    if var_v <= tolerance::ZERO_VARIANCE {
        return Err(ChurError::ZeroVariance("volume"));
    }
    let sigma_v = var_v.sqrt();
    let abs_u_b = char_momentum(&state, lambda_b).norm();
    let rhs = hbar_q / PI * lambda_b * abs_u_b;
    let lambda_v = PI / (hbar_q * lambda_b);
    let abs_phi_v = char_position(&state, lambda_v).norm();
    Ok(LqcReport {
        lambda_b,
        lambda_v,
        sigma_v,
        abs_u_b,
        rhs,
        holds: sigma_v >= rhs - tolerance::CHUR_VIOLATION,
        bound_at_pi: chur::bound(hbar_q * lambda_v * lambda_b),
        abs_phi_v,
        intermediate_holds: abs_u_b * abs_u_b <= 1.0 - abs_phi_v * abs_phi_v + tolerance::CHUR_VIOLATION,
    })
}

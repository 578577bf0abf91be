//! The bound B(γ), ChUR evaluations and the Gram-matrix proof chain.

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;
use serde::Serialize;

use crate::charfunc::{self, CharSource};
use crate::error::{ChurError, Result};
use crate::grid::{self, GridSpec, MixedState, Representation, StateVector};
use crate::tolerance;

/// B(γ) = 2 / (1 + |sin(γ/2)|).
///
/// Algebraically identical to 2√2(√2 − √(1 − cos γ))/(1 + cos γ) but free of
/// the 0/0 at odd multiples of π.
pub fn bound(gamma: f64) -> f64 {
    // |sin(γ/2)| = sin(γ/2 mod π); the reduction makes B(2kπ) = 2 exactly
    2.0 / (1.0 + (0.5 * gamma.abs()).rem_euclid(PI).sin())
}

/// The bound in its original rational form. Singular where cos γ = −1.
pub fn bound_literal(gamma: f64) -> f64 {
    let c = gamma.cos();
    2.0 * SQRT_2 * (SQRT_2 - (1.0 - c).sqrt()) / (1.0 + c)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundEvaluation {
    pub gamma: f64,
    pub value: f64,
}

impl BoundEvaluation {
    pub fn at(gamma: f64) -> Self {
        Self { gamma, value: bound(gamma) }
    }
}

/// Z = (1 + e^{iγ})/2.
pub fn z_constant(gamma: f64) -> Complex64 {
    0.5 * (Complex64::new(1.0, 0.0) + Complex64::from_polar(1.0, gamma))
}

/// Full evaluation of the relation at one (λx, λp).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChurEvaluation {
    pub lambda_x: f64,
    pub lambda_p: f64,
    pub gamma: f64,
    pub phi: Complex64,
    pub phi_tilde: Complex64,
    pub capital_lambda: f64,
    pub bound: f64,
    /// Ω, Θ and det G exist for pure states only.
    pub omega: Option<Complex64>,
    pub theta: Option<Complex64>,
    pub z: Complex64,
    pub gram_det: Option<f64>,
}

impl ChurEvaluation {
    fn assemble(lambda_x: f64, lambda_p: f64, hbar: f64, phi: Complex64, phi_tilde: Complex64, omega: Option<Complex64>) -> Self {
        let gamma = hbar * lambda_x * lambda_p;
        let capital_lambda = phi.norm_sqr() + phi_tilde.norm_sqr();
        let theta = omega.map(|om| om * phi * phi_tilde.conj());
        let gram_det = omega.map(|om| gram_expanded(capital_lambda, om, theta.unwrap_or_default()));
        Self {
            lambda_x,
            lambda_p,
            gamma,
            phi,
            phi_tilde,
            capital_lambda,
            bound: bound(gamma),
            omega,
            theta,
            z: z_constant(gamma),
            gram_det,
        }
    }

    /// B − Λ; negative means the relation is violated.
    pub fn margin(&self) -> f64 {
        self.bound - self.capital_lambda
    }

    pub fn holds(&self) -> bool {
        self.capital_lambda <= self.bound + tolerance::CHUR_VIOLATION
    }

    pub fn record(&self) -> ChurRecord {
        ChurRecord {
            lambda_x: self.lambda_x,
            lambda_p: self.lambda_p,
            gamma: self.gamma,
            abs_phi: self.phi.norm(),
            abs_phi_tilde: self.phi_tilde.norm(),
            capital_lambda: self.capital_lambda,
            bound: self.bound,
            margin: self.margin(),
            abs_omega: self.omega.map_or(f64::NAN, |o| o.norm()),
            gram_det: self.gram_det.unwrap_or(f64::NAN),
        }
    }
}

/// Flat serialization of a [`ChurEvaluation`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChurRecord {
    pub lambda_x: f64,
    pub lambda_p: f64,
    pub gamma: f64,
    pub abs_phi: f64,
    pub abs_phi_tilde: f64,
    pub capital_lambda: f64,
    pub bound: f64,
    pub margin: f64,
    pub abs_omega: f64,
    pub gram_det: f64,
}

/// Evaluates Λ, B, Ω, Θ and det G for a pure state.
pub fn evaluate_chur(state: &StateVector, lambda_x: f64, lambda_p: f64) -> Result<ChurEvaluation> {
    let omega = charfunc::displacement_expectation(state, lambda_x, lambda_p)?;
    Ok(ChurEvaluation::assemble(
        lambda_x,
        lambda_p,
        state.grid().hbar(),
        state.char_position(lambda_x),
        state.char_momentum(lambda_p),
        Some(omega),
    ))
}

/// Λ and B for a mixture; the Gram quantities are left empty.
pub fn evaluate_chur_mixed(state: &MixedState, lambda_x: f64, lambda_p: f64) -> ChurEvaluation {
    ChurEvaluation::assemble(
        lambda_x,
        lambda_p,
        state.grid().hbar(),
        state.char_position(lambda_x),
        state.char_momentum(lambda_p),
        None,
    )
}

/// 1 − Λ − |Ω|² + Θ + Θ*.
pub fn gram_expanded(capital_lambda: f64, omega: Complex64, theta: Complex64) -> f64 {
    1.0 - capital_lambda - omega.norm_sqr() + 2.0 * theta.re
}

/// The Gram matrix of {ψ, e^{iλx x̂}ψ, e^{iλp p̂}ψ}.
pub fn gram_matrix(phi: Complex64, phi_tilde: Complex64, omega: Complex64) -> [[Complex64; 3]; 3] {
    let one = Complex64::new(1.0, 0.0);
    [[one, phi, phi_tilde], [phi.conj(), one, omega], [phi_tilde.conj(), omega.conj(), one]]
}

/// Determinant of a 3×3 complex matrix by cofactor expansion along the first row.
pub fn det3(m: &[[Complex64; 3]; 3]) -> Complex64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GramDeterminant {
    pub direct: f64,
    pub expanded: f64,
    /// Imaginary part of the direct determinant; zero up to rounding.
    pub direct_imag: f64,
}

impl GramDeterminant {
    pub fn value(&self) -> f64 {
        self.expanded
    }

    pub fn routes_agree(&self) -> bool {
        (self.direct - self.expanded).abs() <= tolerance::IDENTITY && self.direct_imag.abs() <= tolerance::IDENTITY
    }

    pub fn is_psd(&self) -> bool {
        self.value() >= -tolerance::GRAM
    }
}

pub fn gram_from_parts(phi: Complex64, phi_tilde: Complex64, omega: Complex64) -> GramDeterminant {
    let det = det3(&gram_matrix(phi, phi_tilde, omega));
    let capital_lambda = phi.norm_sqr() + phi_tilde.norm_sqr();
    let theta = omega * phi * phi_tilde.conj();
    GramDeterminant { direct: det.re, expanded: gram_expanded(capital_lambda, omega, theta), direct_imag: det.im }
}

pub fn gram_determinant(state: &StateVector, lambda_x: f64, lambda_p: f64) -> Result<GramDeterminant> {
    let omega = charfunc::displacement_expectation(state, lambda_x, lambda_p)?;
    Ok(gram_from_parts(state.char_position(lambda_x), state.char_momentum(lambda_p), omega))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProofStep {
    pub passed: bool,
    /// Left side of the inequality (or the reproduced value for step d).
    pub lhs: f64,
    /// Right side of the inequality (or the target value for step d).
    pub rhs: f64,
}

/// Step-by-step replay of the Gram-matrix argument.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProofChainReport {
    pub evaluation: ChurEvaluation,
    /// (a) det G ≥ 0.
    pub gram_psd: ProofStep,
    /// (b) |Θ| ≤ ½|Ω|Λ.
    pub am_gm: ProofStep,
    /// (c) Λ ≤ (1 − |Ω|²)/(1 − |Z||Ω|); `None` when |Z||Ω| ≥ 1.
    pub rearranged: Option<ProofStep>,
    /// (d) the maximizer |Ω|* reproduces B(γ); `None` when |Z| ≤ 1e-6.
    pub maximizer: Option<ProofStep>,
    pub omega_star: Option<f64>,
}

impl ProofChainReport {
    pub fn all_passed(&self) -> bool {
        self.gram_psd.passed
            && self.am_gm.passed
            && self.rearranged.is_none_or(|s| s.passed)
            && self.maximizer.is_none_or(|s| s.passed)
    }
}

/// (1 − w²)/(1 − |Z| w), the right side of the rearranged inequality.
pub fn rearranged_rhs(abs_omega: f64, abs_z: f64) -> f64 {
    (1.0 - abs_omega * abs_omega) / (1.0 - abs_z * abs_omega)
}

/// |Ω|* = (1 − √(1 − |Z|²))/|Z|.
pub fn omega_maximizer(abs_z: f64) -> f64 {
    (1.0 - (1.0 - abs_z * abs_z).max(0.0).sqrt()) / abs_z
}

pub fn proof_chain_from(evaluation: ChurEvaluation) -> ProofChainReport {
    let omega = evaluation.omega.unwrap_or_default();
    let theta = evaluation.theta.unwrap_or_default();
    let lam = evaluation.capital_lambda;
    let abs_omega = omega.norm();
    let abs_z = evaluation.z.norm();
    let det = evaluation.gram_det.unwrap_or(f64::NAN);

    let gram_psd = ProofStep { passed: det >= -tolerance::GRAM, lhs: det, rhs: 0.0 };
    let am_gm_rhs = 0.5 * abs_omega * lam;
    let am_gm = ProofStep { passed: theta.norm() <= am_gm_rhs + tolerance::GRAM, lhs: theta.norm(), rhs: am_gm_rhs };
    let rearranged = (abs_z * abs_omega < 1.0).then(|| {
        let rhs = rearranged_rhs(abs_omega, abs_z);
        ProofStep { passed: lam <= rhs + tolerance::CHUR_VIOLATION, lhs: lam, rhs }
    });
    let (maximizer, omega_star) = if abs_z > 1e-6 {
        let w = omega_maximizer(abs_z);
        let value = if w * abs_z >= 1.0 { 2.0 } else { rearranged_rhs(w, abs_z) };
        let step = ProofStep { passed: (value - evaluation.bound).abs() <= tolerance::GRAM, lhs: value, rhs: evaluation.bound };
        (Some(step), Some(w))
    } else {
        (None, None)
    };
    ProofChainReport { evaluation, gram_psd, am_gm, rearranged, maximizer, omega_star }
}

pub fn proof_chain_check(state: &StateVector, lambda_x: f64, lambda_p: f64) -> Result<ProofChainReport> {
    Ok(proof_chain_from(evaluate_chur(state, lambda_x, lambda_p)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HurRow {
    pub a: f64,
    /// 2 − a(σx²/b² + b²σp²/ħ²)
    pub weakened_lhs: f64,
    pub bound: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HurReport {
    pub sigma_x: f64,
    pub sigma_p: f64,
    pub b: f64,
    pub product: f64,
    pub half_hbar: f64,
    pub heisenberg_holds: bool,
    /// (2 − B(a))/a at the smallest requested a.
    pub small_a_slope: Option<f64>,
    pub rows: Vec<HurRow>,
}

/// Compares the relation, weakened through the variance lower bound, with
/// Heisenberg's σxσp ≥ ħ/2.
pub fn hur_comparison<S: CharSource + ?Sized>(state: &S, a_values: &[f64]) -> Result<HurReport> {
    let hbar = state.grid().hbar();
    let var_x = state.variance(Representation::Position);
    let var_p = state.variance(Representation::Momentum);
    if var_x < tolerance::ZERO_VARIANCE {
        return Err(ChurError::ZeroVariance("position"));
    }
    if var_p < tolerance::ZERO_VARIANCE {
        return Err(ChurError::ZeroVariance("momentum"));
    }
    let (sigma_x, sigma_p) = (var_x.sqrt(), var_p.sqrt());
    let b = (hbar * sigma_x / sigma_p).sqrt();
    let mut rows = Vec::with_capacity(a_values.len());
    for &a in a_values {
        if !(a.is_finite() && a > 0.0) {
            return Err(ChurError::InvalidParameter(format!("a must be positive, got {a}")));
        }
        let weakened_lhs = 2.0 - a * (var_x / (b * b) + b * b * var_p / (hbar * hbar));
        let bnd = bound(a);
        rows.push(HurRow { a, weakened_lhs, bound: bnd, holds: weakened_lhs <= bnd + tolerance::CHUR_VIOLATION });
    }
    let small_a_slope = a_values.iter().copied().reduce(f64::min).map(small_gamma_slope);
    let product = sigma_x * sigma_p;
    Ok(HurReport {
        sigma_x,
        sigma_p,
        b,
        product,
        half_hbar: 0.5 * hbar,
        heisenberg_holds: product >= 0.5 * hbar - tolerance::CHUR_VIOLATION,
        small_a_slope,
        rows,
    })
}

/// (2 − B(a))/a, which tends to 1 as a → 0⁺.
pub fn small_gamma_slope(a: f64) -> f64 {
    (2.0 - bound(a)) / a
}

/// σx²σp² − cov² against ħ²/4.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RobertsonSchrodinger {
    pub var_x: f64,
    pub var_p: f64,
    pub covariance: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

pub fn robertson_schrodinger(state: &StateVector) -> RobertsonSchrodinger {
    let var_x = grid::variance(state, Representation::Position);
    let var_p = grid::variance(state, Representation::Momentum);
    let covariance = grid::covariance(state);
    let lhs = var_x * var_p - covariance * covariance;
    let hbar = state.grid().hbar();
    let rhs = 0.25 * hbar * hbar;
    RobertsonSchrodinger { var_x, var_p, covariance, lhs, rhs, holds: lhs >= rhs - tolerance::CHUR_VIOLATION }
}

/// Evaluates many states on a fixed rectangular (λx, λp) lattice.
///
/// Phase tables are built once per lattice, and each λp translation is
/// shared by every λx, so the per-state cost is one forward transform plus
/// one inverse transform per λp. Values coincide with [`evaluate_chur`].
#[derive(Debug, Clone)]
pub struct ChurSweep {
    grid: GridSpec,
    lambda_x: Vec<f64>,
    lambda_p: Vec<f64>,
    x_phases: Vec<Vec<Complex64>>,
    p_phases: Vec<Vec<Complex64>>,
}

/// Per-state output of [`ChurSweep::evaluate`], row-major in (λx, λp).
#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub evaluations: Vec<ChurEvaluation>,
    pub var_x: f64,
    pub var_p: f64,
}

impl ChurSweep {
    pub fn new(grid: GridSpec, lambda_x: Vec<f64>, lambda_p: Vec<f64>) -> Result<Self> {
        for &lp in &lambda_p {
            grid::check_shift(&grid, grid.hbar() * lp)?;
        }
        let x_phases = lambda_x
            .iter()
            .map(|&l| grid.positions().map(|x| Complex64::from_polar(1.0, l * x)).collect())
            .collect();
        let p_phases = lambda_p
            .iter()
            .map(|&l| grid.momenta().map(|p| Complex64::from_polar(1.0, l * p)).collect())
            .collect();
        Ok(Self { grid, lambda_x, lambda_p, x_phases, p_phases })
    }

    /// Symmetric lattice of `points` values on [−max, max] in both variables.
    pub fn square(grid: GridSpec, max: f64, points: usize) -> Result<Self> {
        let axis = linspace(-max, max, points);
        Self::new(grid, axis.clone(), axis)
    }

    pub fn lambda_x(&self) -> &[f64] {
        &self.lambda_x
    }

    pub fn lambda_p(&self) -> &[f64] {
        &self.lambda_p
    }

    pub fn evaluate(&self, state: &StateVector) -> Result<SweepOutcome> {
        if *state.grid() != self.grid {
            return Err(ChurError::GridMismatch);
        }
        let g = &self.grid;
        let mom = grid::to_momentum(state);
        let rho: Vec<f64> = state.density();
        let rho_p: Vec<f64> = mom.density();
        let phis: Vec<Complex64> = self.x_phases.iter().zip(&self.lambda_x).map(|(t, &l)| weighted(t, &rho, g.dx(), l)).collect();
        let phi_tildes: Vec<Complex64> =
            self.p_phases.iter().zip(&self.lambda_p).map(|(t, &l)| weighted(t, &rho_p, g.dp(), l)).collect();

        let mut evaluations = vec![None; self.lambda_x.len() * self.lambda_p.len()];
        for (ip, &lp) in self.lambda_p.iter().enumerate() {
            let shifted = grid::translate_momentum(&mom, g.hbar() * lp)?;
            // conj(ψ) · ψ(x + ħλp), reused for every λx
            let overlap: Vec<Complex64> =
                state.amplitudes().iter().zip(shifted.amplitudes()).map(|(a, b)| a.conj() * b).collect();
            for (ix, &lx) in self.lambda_x.iter().enumerate() {
                let omega = self.x_phases[ix].iter().zip(&overlap).map(|(t, o)| t.conj() * o).sum::<Complex64>() * g.dx();
                let omega = if lx == 0.0 && lp == 0.0 { Complex64::new(1.0, 0.0) } else { omega };
                evaluations[ix * self.lambda_p.len() + ip] =
                    Some(ChurEvaluation::assemble(lx, lp, g.hbar(), phis[ix], phi_tildes[ip], Some(omega)));
            }
        }
        Ok(SweepOutcome {
            evaluations: evaluations.into_iter().map(|e| e.expect("filled")).collect(),
            var_x: grid::moments(g.positions(), &rho, g.dx()).variance,
            var_p: grid::moments(g.momenta(), &rho_p, g.dp()).variance,
        })
    }
}

fn weighted(table: &[Complex64], density: &[f64], step: f64, lambda: f64) -> Complex64 {
    if lambda == 0.0 {
        return Complex64::new(density.iter().sum::<f64>() * step, 0.0);
    }
    table.iter().zip(density).map(|(t, r)| t * r).sum::<Complex64>() * step
}

/// `points` evenly spaced values from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    match points {
        0 => vec![],
        1 => vec![lo],
        _ => (0..points).map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64).collect(),
    }
}

/// `points` logarithmically spaced values from `lo` to `hi` inclusive.
pub fn logspace(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    linspace(lo.ln(), hi.ln(), points).into_iter().map(f64::exp).collect()
}

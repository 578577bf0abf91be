//! # chur
//!
//! Numerical verification of the uncertainty relation for the characteristic
//! functions of position and momentum densities,
//!
//! |Φ(λx)|² + |Φ̃(λp)|² ≤ B(ħ λx λp),   B(γ) = 2 / (1 + |sin(γ/2)|),
//!
//! together with the Gram-matrix chain that proves it and three applications:
//! detection masks, qubit-assisted measurement of Φ̃, and finite-dimensional
//! Weyl pairs (including the Loop Quantum Cosmology volume relation).
//!
//! ## Layout
//!
//! - [`grid`]: uniform grids, pure and mixed states, unitary transforms.
//! - [`charfunc`]: characteristic functions, the autocorrelation form, Ω.
//! - [`chur`]: the bound, ChUR evaluation, Gram diagnostics, HUR comparison, sweeps.
//! - [`states`]: Gaussian, comb, and seeded Hermite–Gauss random states.
//! - [`mask`]: detection masks and the mask uncertainty relation.
//! - [`protocols`]: qubit readout, Weyl pairs, LQC.
//! - [`tightness`]: Nelder–Mead search for the largest Λ at fixed γ.
//! - [`io`]: plain-text state and mask tables.

#![forbid(unsafe_code)]
// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod charfunc;
pub mod chur;
pub mod error;
pub mod grid;
pub mod io;
pub mod mask;
pub mod protocols;
pub mod states;
pub mod tightness;
pub mod tolerance;

mod fft;

pub use error::{ChurError, Result};
pub use num_complex::Complex64;

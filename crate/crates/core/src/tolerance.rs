//! Numerical tolerances shared by the checks and the test suites.
//!
//! | Constant | Value | Used for |
//! |----------|-------|----------|
//! | `IDENTITY` | 1e-12 | identities that hold up to rounding (norms, Hermiticity, Z) |
//! | `TRANSFORM` | 1e-8 | checks that pass through one conjugate-domain round trip |
//! | `WEYL` | 1e-9 | BCH phase rule for the displacement expectation |
//! | `CHUR_VIOLATION` | 1e-9 | Λ ≤ B(γ) and the proof-chain rearrangement |
//! | `GRAM` | 1e-10 | det G ≥ 0, AM-GM step, variance lower bound |

/// Identities that hold up to floating point rounding.
pub const IDENTITY: f64 = 1e-12;

/// Results mediated by a forward and inverse transform.
pub const TRANSFORM: f64 = 1e-8;

/// Weyl/BCH transformation rule of the displacement expectation.
pub const WEYL: f64 = 1e-9;

/// Allowed excess of Λ over the bound.
pub const CHUR_VIOLATION: f64 = 1e-9;

/// Allowed negativity of the Gram determinant.
pub const GRAM: f64 = 1e-10;

/// Allowed violation of Re Φ ≥ 1 − λ²σ²/2.
pub const LOWER_BOUND: f64 = 1e-10;

/// Relative slack of the detection-mask relation.
pub const MASK_RELATIVE: f64 = 1e-6;

/// Finite-dimensional Weyl pair checks.
pub const FINITE_DIM: f64 = 1e-12;

/// Variances below this are treated as zero.
pub const ZERO_VARIANCE: f64 = 1e-12;

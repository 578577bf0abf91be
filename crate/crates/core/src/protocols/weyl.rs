//! Weyl pairs UW = e^{iφ}WU in finite dimension.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::chur;
use crate::error::{ChurError, Result};
use crate::tolerance;

const CHUNK: usize = 1024;

#[derive(Debug, Clone, PartialEq)]
pub struct WeylPair {
    dimension: usize,
    u_matrix: DMatrix<Complex64>,
    w_matrix: DMatrix<Complex64>,
    phase: f64,
}

impl WeylPair {
    /// Validates unitarity of both matrices and the commutation rule.
    pub fn new(u_matrix: DMatrix<Complex64>, w_matrix: DMatrix<Complex64>, phase: f64) -> Result<Self> {
        let d = u_matrix.nrows();
        if d < 2 {
            return Err(ChurError::InvalidParameter(format!("dimension must be at least 2, got {d}")));
        }
        for m in [&u_matrix, &w_matrix] {
            if m.nrows() != d || m.ncols() != d {
                return Err(ChurError::DimensionMismatch { expected: d, got: m.ncols().max(m.nrows()) });
            }
            let defect = max_abs(&(m.adjoint() * m - DMatrix::identity(d, d)));
            if defect > tolerance::FINITE_DIM {
                return Err(ChurError::NotUnitary(defect));
            }
        }
        let pair = Self { dimension: d, u_matrix, w_matrix, phase };
        let defect = pair.commutation_defect();
        if defect > tolerance::FINITE_DIM {
            return Err(ChurError::InvalidParameter(format!("UW − e^{{iφ}}WU has entries of size {defect:e}")));
        }
        Ok(pair)
    }

    /// Clock U = diag(1, ω, …, ω^{d−1}) and cyclic shift W|k⟩ = |k+1⟩,
    /// ω = e^{2πi/d}, so that φ = 2π/d.
    pub fn clock_shift(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(ChurError::InvalidParameter(format!("dimension must be at least 2, got {d}")));
        }
        let phase = 2.0 * PI / d as f64;
        let u = DMatrix::from_fn(d, d, |r, c| if r == c { Complex64::from_polar(1.0, phase * r as f64) } else { Complex64::default() });
        let w = DMatrix::from_fn(d, d, |r, c| if r == (c + 1) % d { Complex64::new(1.0, 0.0) } else { Complex64::default() });
        Self::new(u, w, phase)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn u_matrix(&self) -> &DMatrix<Complex64> {
        &self.u_matrix
    }

    pub fn w_matrix(&self) -> &DMatrix<Complex64> {
        &self.w_matrix
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }

    /// Largest entry of |UW − e^{iφ}WU|.
    pub fn commutation_defect(&self) -> f64 {
        let lhs = &self.u_matrix * &self.w_matrix;
        let rhs = &self.w_matrix * &self.u_matrix * Complex64::from_polar(1.0, self.phase);
        max_abs(&(lhs - rhs))
    }

    pub fn bound(&self) -> f64 {
        chur::bound(self.phase)
    }
}

fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FiniteDimCheck {
    pub expect_u: Complex64,
    pub expect_w: Complex64,
    /// |⟨U⟩|² + |⟨W⟩|².
    pub lhs: f64,
    pub bound: f64,
    pub holds: bool,
}

pub fn finite_dim_chur(pair: &WeylPair, state: &DVector<Complex64>) -> Result<FiniteDimCheck> {
    if state.len() != pair.dimension {
        return Err(ChurError::DimensionMismatch { expected: pair.dimension, got: state.len() });
    }
    let norm = state.norm_squared();
    if (norm - 1.0).abs() > tolerance::FINITE_DIM {
        return Err(ChurError::NotUnitVector(norm));
    }
    let expect_u = state.dotc(&(&pair.u_matrix * state));
    let expect_w = state.dotc(&(&pair.w_matrix * state));
    let lhs = expect_u.norm_sqr() + expect_w.norm_sqr();
    let bound = pair.bound();
    Ok(FiniteDimCheck { expect_u, expect_w, lhs, bound, holds: lhs <= bound + tolerance::FINITE_DIM })
}

/// Uniformly distributed pure state: a normalized complex Gaussian vector.
pub fn random_unit_vector<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DVector<Complex64> {
    let v = DVector::from_fn(d, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im)
    });
    let n = v.norm();
    v / Complex64::new(n, 0.0)
}

/// One `d, phi, lhs_max, bound` row.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FiniteDimRecord {
    pub d: usize,
    pub phi: f64,
    pub lhs_max: f64,
    pub bound: f64,
}

/// Largest lhs over `samples` seeded random states. Chunks of states run in
/// parallel, each on its own ChaCha stream, so the result does not depend on
/// the thread count.
pub fn finite_dim_scan(pair: &WeylPair, samples: usize, seed: u64) -> Result<FiniteDimRecord> {
    let chunks = samples.div_ceil(CHUNK);
    let maxima: Vec<f64> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let count = CHUNK.min(samples - c * CHUNK);
            let mut best = f64::NEG_INFINITY;
            for _ in 0..count {
                let v = random_unit_vector(pair.dimension, &mut rng);
                best = best.max(finite_dim_chur(pair, &v)?.lhs);
            }
            Ok(best)
        })
        .collect::<Result<_>>()?;
    Ok(FiniteDimRecord {
        d: pair.dimension,
        phi: pair.phase,
        lhs_max: maxima.into_iter().fold(f64::NEG_INFINITY, f64::max),
        bound: pair.bound(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clock_shift_commutes_up_to_phase() {
        for d in [2, 3, 5, 16, 64] {
            let p = WeylPair::clock_shift(d).unwrap();
            assert!(p.commutation_defect() <= 1e-12);
        }
    }

    #[test]
    fn qubit_saturation_at_basis_vector() {
        let p = WeylPair::clock_shift(2).unwrap();
        let mut v = DVector::zeros(2);
        v[0] = Complex64::new(1.0, 0.0);
        let c = finite_dim_chur(&p, &v).unwrap();
        assert!((c.lhs - 1.0).abs() < 1e-15);
        assert!((c.bound - 1.0).abs() < 1e-15);
        assert!(c.holds);
    }

    #[test]
    fn rejects_bad_inputs() {
        let p = WeylPair::clock_shift(3).unwrap();
        let v = DVector::from_element(3, Complex64::new(1.0, 0.0));
        assert!(matches!(finite_dim_chur(&p, &v), Err(ChurError::NotUnitVector(_))));
        let bad = DMatrix::from_element(2, 2, Complex64::new(1.0, 0.0));
        assert!(matches!(WeylPair::new(bad.clone(), bad, PI), Err(ChurError::NotUnitary(_))));
    }

    #[test]
    fn large_dimension_bound() {
        let p = WeylPair::clock_shift(64).unwrap();
        assert!((p.bound() - 2.0 / (1.0 + (PI / 64.0).sin())).abs() < 1e-15);
    }

    #[test]
    fn scan_is_deterministic() {
        let p = WeylPair::clock_shift(4).unwrap();
        assert_eq!(finite_dim_scan(&p, 3000, 1).unwrap(), finite_dim_scan(&p, 3000, 1).unwrap());
    }
}

#![allow(dead_code)]

use chur::grid::{GridSpec, StateVector};
use chur::io::MaskTable;
use chur::mask::{MaskKind, MaskSpec};
use chur::states::{make_gaussian, make_random, GaussianSpec, RandomStateSpec};
use chur::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn ground() -> StateVector {
    make_gaussian(&GaussianSpec::ground(1.0), &GridSpec::standard()).unwrap()
}

pub fn random_state(seed: u64) -> StateVector {
    make_random(&RandomStateSpec::new(seed), &GridSpec::standard()).unwrap()
}

/// Analytic Gaussian wavefunction with position spread `s`, center `x0` and
/// mean momentum `p0` (ħ = 1).
pub fn gaussian_psi(x: f64, s: f64, x0: f64, p0: f64) -> Complex64 {
    let norm = (2.0 * std::f64::consts::PI * s * s).powf(-0.25);
    Complex64::from_polar(norm * (-(x - x0).powi(2) / (4.0 * s * s)).exp(), p0 * x)
}

/// Standard normal CDF.
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * (1.0 + statrs::function::erf::erf(z / std::f64::consts::SQRT_2))
}

/// A smooth complex amplitude with |𝒜| ≤ 1: a Gaussian envelope times a
/// slowly varying modulation and phase, tabulated on [−4, 4].
pub fn random_smooth_mask(seed: u64) -> MaskSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let center: f64 = rng.random_range(-1.0..1.0);
    let width: f64 = rng.random_range(0.4..1.2);
    let k1: f64 = rng.random_range(0.5..4.0);
    let f1: f64 = rng.random_range(0.0..6.3);
    let depth: f64 = rng.random_range(0.0..0.5);
    let phase: Vec<(f64, f64, f64)> =
        (0..3).map(|_| (rng.random_range(-1.5..1.5), rng.random_range(0.2..3.0), rng.random_range(0.0..6.3))).collect();
    let h = 0.02;
    let values = (0..=400)
        .map(|i| {
            let x = -4.0 + i as f64 * h;
            let env = (-(x - center).powi(2) / (2.0 * width * width)).exp();
            let amp = env * (1.0 - depth + depth * (k1 * x + f1).cos());
            let arg: f64 = phase.iter().map(|(a, k, b)| a * (k * x + b).sin()).sum();
            Complex64::from_polar(amp, arg)
        })
        .collect();
    MaskSpec::new(MaskKind::Tabulated(MaskTable { x0: -4.0, dx: h, values }), 1.0).unwrap()
}

//! Library values against independently computed references: closed forms,
//! brute-force quadrature on finer grids, and error-function integrals.

mod common;

use std::f64::consts::PI;

use chur::charfunc::{char_momentum, char_momentum_autocorr, char_position, displacement_expectation};
use chur::chur::{bound, evaluate_chur, gram_determinant, z_constant};
use chur::grid::{self, GridSpec, StateVector};
use chur::mask::{detect_momentum, detect_position, mask_transform_identity, MaskKind, MaskSpec};
use chur::protocols::{finite_dim_chur, lqc_bound_check, qubit_exact, LqcScenario, WeylPair};
use chur::states::{make_gaussian, GaussianSpec};
use chur::Complex64;
use common::{gaussian_psi, ground, normal_cdf, random_state};
use nalgebra::{DMatrix, DVector, Matrix3};

fn shifted_gaussian(s: f64, x0: f64, p0: f64) -> StateVector {
    make_gaussian(&GaussianSpec { sigma_x: s, center_x: x0, center_p: p0 }, &GridSpec::standard()).unwrap()
}

#[test]
fn gaussian_characteristic_functions() {
    let (s, x0, p0) = (0.8, 0.6, -1.1);
    let state = shifted_gaussian(s, x0, p0);
    let sp = 0.5 / s;
    for &l in &[-3.0, -0.4, 0.0, 1.0, 2.5] {
        let phi = Complex64::from_polar((-0.5 * l * l * s * s).exp(), l * x0);
        let phi_t = Complex64::from_polar((-0.5 * l * l * sp * sp).exp(), l * p0);
        assert!((char_position(&state, l) - phi).norm() < 1e-12, "phi at {l}");
        assert!((char_momentum(&state, l) - phi_t).norm() < 1e-12, "phi tilde at {l}");
        assert!((char_momentum_autocorr(&state, l).unwrap() - phi).norm() < 1e-10, "autocorrelation at {l}");
    }
}

#[test]
fn gaussian_displacement_expectation() {
    // Ω = e^{−t²/(8s²)} e^{iλx t/2} e^{−λx² s²/2} with t = ħλp for a centered Gaussian
    let s = 1.3;
    let state = shifted_gaussian(s, 0.0, 0.0);
    for &(lx, lp) in &[(0.5, 0.5), (-1.0, 2.0), (2.0, -3.0), (0.0, 4.0)] {
        let omega = displacement_expectation(&state, lx, lp).unwrap();
        let t: f64 = lp;
        let expected = Complex64::from_polar((-t * t / (8.0 * s * s) - 0.5 * lx * lx * s * s).exp(), 0.5 * lx * t);
        assert!((omega - expected).norm() < 1e-12, "({lx}, {lp}): {omega} vs {expected}");
    }
}

/// Gram matrix of ψ, e^{iλx x̂}ψ and e^{iλp p̂}ψ from the analytic wavefunction,
/// integrated on a grid four times finer than the library's.
#[test]
fn gram_determinant_brute_force() {
    let (s, x0, p0) = (0.9, 0.4, 0.7);
    let state = shifted_gaussian(s, x0, p0);
    let g = GridSpec::standard();
    let n = 4 * g.n_points();
    let h = g.length() / n as f64;
    let xs: Vec<f64> = (0..n).map(|j| g.x_min() + j as f64 * h).collect();
    for &(lx, lp) in &[(1.0, 1.0), (2.0, 0.7), (-1.5, 3.0), (3.0, 2.0)] {
        let psi: Vec<Complex64> = xs.iter().map(|&x| gaussian_psi(x, s, x0, p0)).collect();
        let b: Vec<Complex64> = xs.iter().zip(&psi).map(|(&x, v)| v * Complex64::from_polar(1.0, lx * x)).collect();
        let c: Vec<Complex64> = xs.iter().map(|&x| gaussian_psi(x + lp, s, x0, p0)).collect();
        let dot = |u: &[Complex64], v: &[Complex64]| u.iter().zip(v).map(|(a, b)| a.conj() * b).sum::<Complex64>() * h;
        let vs = [&psi, &b, &c];
        let m = Matrix3::from_fn(|i, j| dot(vs[i], vs[j]));
        let det = m.determinant();
        let lib = gram_determinant(&state, lx, lp).unwrap();
        assert!((lib.value() - det.re).abs() < 1e-10, "({lx}, {lp}): {} vs {}", lib.value(), det.re);
        assert!(lib.routes_agree());
        let eig = m.symmetric_eigenvalues();
        assert!(eig.iter().all(|e| *e >= -1e-12));
    }
}

#[test]
fn gram_matrix_of_explicit_vectors_is_psd_for_random_states() {
    for seed in 0..5 {
        let state = random_state(seed);
        let g = *state.grid();
        for &(lx, lp) in &[(0.7, 1.9), (3.0, -2.0), (-4.5, 4.5)] {
            let psi = state.amplitudes();
            let b: Vec<Complex64> = g.positions().zip(psi).map(|(x, v)| v * Complex64::from_polar(1.0, lx * x)).collect();
            let c = grid::translate(&state, lp).unwrap();
            let vs: [&[Complex64]; 3] = [psi, &b, c.amplitudes()];
            let m = DMatrix::from_fn(3, 3, |i, j| vs[i].iter().zip(vs[j]).map(|(a, b)| a.conj() * b).sum::<Complex64>() * g.dx());
            let det = m.determinant().re;
            let lib = gram_determinant(&state, lx, lp).unwrap();
            assert!((lib.value() - det).abs() < 1e-10);
            assert!(m.symmetric_eigenvalues().iter().all(|e| *e >= -1e-10));
        }
    }
}

/// Ω(−λx, −λp) = e^{iγ}·conj Ω(λx, λp), from e^{A}e^{B} = e^{B}e^{A}e^{[A,B]}.
#[test]
fn weyl_transformation_rule() {
    let state = random_state(11);
    for &(lx, lp) in &[(0.3, 0.8), (1.7, -2.2), (-3.1, 4.0)] {
        let gamma = lx * lp;
        let plus = displacement_expectation(&state, lx, lp).unwrap();
        let minus = displacement_expectation(&state, -lx, -lp).unwrap();
        assert!((minus - Complex64::from_polar(1.0, gamma) * plus.conj()).norm() < 1e-9, "({lx}, {lp})");
    }
}

#[test]
fn z_constant_modulus() {
    for i in 0..200 {
        let gamma = -10.0 + 0.1 * i as f64;
        assert!((z_constant(gamma).norm() - (gamma / 2.0).cos().abs()).abs() < 1e-15);
    }
}

#[test]
fn bound_landmarks() {
    assert_eq!(bound(0.0), 2.0);
    assert_eq!(bound(PI), 1.0);
    assert!((bound(2.0 * PI) - 2.0).abs() < 1e-15);
    assert!((bound(PI / 32.0) - 2.0 / (1.0 + (PI / 64.0).sin())).abs() < 1e-15);
}

#[test]
fn top_hat_readouts_match_error_functions() {
    let state = ground();
    let delta = 1.0;
    let mask = MaskSpec::new(MaskKind::TopHat { width: delta }, 1.0).unwrap();
    let ys: Vec<f64> = (0..61).map(|i| -4.0 + i as f64 * 0.1).collect();
    let q = detect_position(&mask, &state, &ys).unwrap();
    let p = detect_momentum(&mask, &state, &ys).unwrap();
    for (i, &y) in ys.iter().enumerate() {
        // x ~ N(0, 1), p ~ N(0, 1/4); both probabilities of landing in [−y, δ − y]
        let q_ref = normal_cdf(delta - y) - normal_cdf(-y);
        let p_ref = normal_cdf((delta - y) / 0.5) - normal_cdf(-y / 0.5);
        assert!((q[i] - q_ref).abs() < 1e-9, "q at {y}: {} vs {q_ref}", q[i]);
        assert!((p[i] - p_ref).abs() < 1e-9, "p at {y}: {} vs {p_ref}", p[i]);
    }
}

#[test]
fn gaussian_mask_convolution_closed_form() {
    let (s, mu, p0) = (0.7, 0.5, 1.2);
    let sp = 0.5 / s;
    let state = shifted_gaussian(s, mu, p0);
    let sigma = 0.9;
    let kappa = 1.7;
    let mask = MaskSpec::new(MaskKind::Gaussian { sigma }, kappa).unwrap();
    let ys: Vec<f64> = (0..41).map(|i| -5.0 + i as f64 * 0.25).collect();
    let q = detect_position(&mask, &state, &ys).unwrap();
    let p = detect_momentum(&mask, &state, &ys).unwrap();
    let conv = |y: f64, m: f64, v: f64| sigma / (sigma * sigma + v).sqrt() * (-(y + m).powi(2) / (2.0 * (sigma * sigma + v))).exp();
    for (i, &y) in ys.iter().enumerate() {
        assert!((q[i] - conv(y, mu, s * s)).abs() < 1e-9);
        assert!((p[i] - conv(y, kappa * p0, (kappa * sp).powi(2))).abs() < 1e-9);
    }
}

#[test]
fn readout_transform_is_product() {
    let state = shifted_gaussian(1.1, -0.3, 0.4);
    let lambdas: Vec<f64> = (0..21).map(|i| -5.0 + 0.5 * i as f64).collect();
    for mask in [
        MaskSpec::new(MaskKind::Gaussian { sigma: 1.0 }, 1.0).unwrap(),
        MaskSpec::new(MaskKind::TopHat { width: 1.0 }, 0.8).unwrap(),
    ] {
        let r = mask_transform_identity(&mask, &state, &lambdas).unwrap();
        assert!(r.holds, "{r:?}");
    }
}

#[test]
fn qubit_readout_gaussian_modulus() {
    let r = qubit_exact(&ground(), 1.0).unwrap();
    assert!((r.reconstructed.norm() - (-1.0f64 / 8.0).exp()).abs() < 1e-9);
}

#[test]
fn qubit_readout_narrow_momentum_phase() {
    let g = GridSpec::new(8192, 2000.0, 1.0, 0.0).unwrap();
    let p0 = 0.7;
    let state = make_gaussian(&GaussianSpec { sigma_x: 50.0, center_x: 0.0, center_p: p0 }, &g).unwrap();
    for &l in &[0.5, 1.0, 3.0] {
        let r = qubit_exact(&state, l).unwrap();
        let diff = (r.reconstructed.arg() - l * p0 + PI).rem_euclid(2.0 * PI) - PI;
        assert!(diff.abs() < 1e-3, "lambda {l}");
    }
}

#[test]
fn qubit_brute_force_over_bloch_sphere() {
    let pair = WeylPair::clock_shift(2).unwrap();
    let mut best: f64 = 0.0;
    for i in 0..=200 {
        for j in 0..=200 {
            let theta = PI * i as f64 / 200.0;
            let phi = 2.0 * PI * j as f64 / 200.0;
            let v = DVector::from_vec(vec![
                Complex64::new((theta / 2.0).cos(), 0.0),
                Complex64::from_polar((theta / 2.0).sin(), phi),
            ]);
            best = best.max(finite_dim_chur(&pair, &v).unwrap().lhs);
        }
    }
    assert!((1.0 - 1e-12..=1.0 + 1e-12).contains(&best), "{best}");
}

#[test]
fn lqc_gaussian_with_rescaled_conjugation() {
    let g = GridSpec::new(4096, 64.0, 1.0, 0.0).unwrap();
    let (s, q, lb) = (2.0, 2.5, 0.8);
    let state = make_gaussian(&GaussianSpec::ground(s), &g).unwrap();
    let r = lqc_bound_check(&LqcScenario { q_constant: q, lambda_b: lb, state_v: state }).unwrap();
    let sigma_b = q / (2.0 * s);
    assert!((r.abs_u_b - (-0.5 * lb * lb * sigma_b * sigma_b).exp()).abs() < 1e-10);
    assert!((r.lambda_v - PI / (q * lb)).abs() < 1e-15);
    assert!((r.abs_phi_v - (-0.5 * (r.lambda_v * s).powi(2)).exp()).abs() < 1e-10);
    assert!(r.holds && r.intermediate_holds);
}

#[test]
fn gaussian_lambda_along_heisenberg_parametrization() {
    let state = ground();
    for a in [0.01f64, 0.5, 2.0, 10.0] {
        let b = 2f64.sqrt();
        let e = evaluate_chur(&state, a.sqrt() / b, b * a.sqrt()).unwrap();
        assert!((e.capital_lambda - 2.0 * (-a / 2.0).exp()).abs() < 1e-12);
    }
}

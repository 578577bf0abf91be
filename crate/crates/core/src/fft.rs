//! Thin wrappers over `rustfft` with a per-thread planner cache.

use std::cell::RefCell;
use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// Unnormalized forward transform, X_k = Σ_j x_j e^{-2πi jk/N}.
pub(crate) fn forward(data: &mut [Complex64]) {
    let fft = PLANNER.with(|p| p.borrow_mut().plan_fft_forward(data.len()));
    fft.process(data);
}

/// Unnormalized inverse transform, x_j = Σ_k X_k e^{+2πi jk/N}.
pub(crate) fn inverse(data: &mut [Complex64]) {
    let fft = PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(data.len()));
    fft.process(data);
}

/// Signed frequency index of bin `m` for an `n`-point transform; the Nyquist
/// bin maps to `-n/2`.
pub(crate) fn signed_index(m: usize, n: usize) -> f64 {
    if m < n / 2 {
        m as f64
    } else {
        m as f64 - n as f64
    }
}

/// Band-limited periodic interpolant of `samples` (uniform spacing) evaluated
/// at `u + shift` for every sample position `u`.
pub(crate) fn spectral_shift(samples: &[Complex64], spacing: f64, shift: f64) -> Vec<Complex64> {
    let n = samples.len();
    let mut buf = samples.to_vec();
    forward(&mut buf);
    let base = 2.0 * PI * shift / (n as f64 * spacing);
    let scale = 1.0 / n as f64;
    for (m, c) in buf.iter_mut().enumerate() {
        let phase = base * signed_index(m, n);
        *c *= Complex64::from_polar(scale, phase);
    }
    inverse(&mut buf);
    buf
}

/// Chirp-z transform: Σ_j v_j e^{−i k j θ} for k = 0..count, via Bluestein's
/// identity kj = (k² + j² − (k − j)²)/2 and one FFT convolution.
pub(crate) fn chirp_z(values: &[Complex64], theta: f64, count: usize) -> Vec<Complex64> {
    let s = values.len();
    if s == 0 || count == 0 {
        return vec![Complex64::default(); count];
    }
    let chirp = |n: i64| Complex64::from_polar(1.0, 0.5 * theta * (n * n) as f64);
    let size = (s + count - 1).next_power_of_two();
    let mut a = vec![Complex64::default(); size];
    for (j, v) in values.iter().enumerate() {
        a[j] = v * chirp(j as i64).conj();
    }
    // b_n = e^{iθn²/2} for n in −(s−1)..count, stored cyclically
    let mut b = vec![Complex64::default(); size];
    for n in 0..count as i64 {
        b[n as usize] = chirp(n);
    }
    for n in 1..s as i64 {
        b[size - n as usize] = chirp(n);
    }
    forward(&mut a);
    forward(&mut b);
    for (x, y) in a.iter_mut().zip(&b) {
        *x *= y;
    }
    inverse(&mut a);
    let scale = 1.0 / size as f64;
    (0..count).map(|k| a[k] * chirp(k as i64).conj() * scale).collect()
}

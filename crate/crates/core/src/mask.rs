//! Detection masks and the mask uncertainty relation.
//!
//! A mask function M enters through
//!
//! 𝒬(y) = ∫ M(x + y) ρ(x) dx,   𝒫(y) = ∫ M(κp + y) ρ̃(p) dp,
//!
//! and the relation ∫(|𝒬|² + |𝒫|²) dy ≤ ∫ |M̃(λ)|² B(ħκλ²) dλ, where
//! M̃(λ) = (2π)^{-1/2} ∫ e^{−iλu} M(u) du.
//!
//! Detection probabilities are computed in the conjugate domain: the density
//! enters through its characteristic function, M through its closed-form
//! transform, so discontinuous apertures cost no accuracy. A Riemann-sum
//! route in position space is kept as a cross-check for smooth masks.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::charfunc::CharSource;
use crate::chur;
use crate::error::{ChurError, Result};
use crate::fft;
use crate::grid::{self, GridSpec, StateVector};
use crate::io::MaskTable;
use crate::tolerance;

const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;
/// Relative level below which |M̃|² is treated as zero.
pub const TRUNCATION: f64 = 1e-14;
/// Largest |λ| integrated explicitly; the remainder enters through Parseval.
pub const LAMBDA_CAP: f64 = 200.0;
const MAX_LATTICE: usize = 1 << 22;
const GAUSSIAN_REACH: f64 = 10.0;

#[derive(Debug, Clone, PartialEq)]
pub enum MaskKind {
    /// M = 1 on [0, width].
    TopHat { width: f64 },
    /// M = exp(−x²/(2σ²)).
    Gaussian { sigma: f64 },
    /// M = 1 where (x mod period) < duty·period.
    Periodic { period: f64, duty: f64 },
    /// Amplitude 𝒜 sampled on a uniform lattice; M = |𝒜|².
    Tabulated(MaskTable),
}

/// Real phase φ(x) on a uniform lattice, linearly interpolated and zero outside.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseProfile {
    pub x0: f64,
    pub dx: f64,
    pub values: Vec<f64>,
}

impl PhaseProfile {
    pub fn at(&self, x: f64) -> f64 {
        let t = (x - self.x0) / self.dx;
        if t < 0.0 || t > (self.values.len() - 1) as f64 {
            return 0.0;
        }
        let i = (t.floor() as usize).min(self.values.len() - 2);
        let f = t - i as f64;
        self.values[i] * (1.0 - f) + self.values[i + 1] * f
    }

    pub fn from_table(table: &MaskTable) -> Self {
        Self { x0: table.x0, dx: table.dx, values: table.values.iter().map(|v| v.re).collect() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaskSpec {
    pub kind: MaskKind,
    /// Stored for completeness; transmittance does not depend on it.
    pub phase_profile: Option<PhaseProfile>,
    /// Position per momentum, κ > 0.
    pub kappa: f64,
}

/// Which function of the aperture plays the role of M.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MaskResponse {
    /// M = |𝒜|², the detector transmittance.
    Transmittance,
    /// M = 𝒜 = A e^{iφ}, a complex mask function.
    Amplitude,
}

impl MaskSpec {
    pub fn new(kind: MaskKind, kappa: f64) -> Result<Self> {
        let spec = Self { kind, phase_profile: None, kappa };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_phase(mut self, phase: PhaseProfile) -> Result<Self> {
        if phase.values.len() < 2 || !(phase.dx > 0.0) {
            return Err(ChurError::InvalidMask("phase profile needs two or more uniformly spaced samples".into()));
        }
        self.phase_profile = Some(phase);
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.kappa.is_finite() && self.kappa > 0.0) {
            return Err(ChurError::InvalidMask(format!("kappa must be positive, got {}", self.kappa)));
        }
        match &self.kind {
            MaskKind::TopHat { width } if !(width.is_finite() && *width >= 0.0) => {
                Err(ChurError::InvalidMask(format!("top-hat width must be non-negative, got {width}")))
            }
            MaskKind::Gaussian { sigma } if !(sigma.is_finite() && *sigma > 0.0) => {
                Err(ChurError::InvalidMask(format!("gaussian sigma must be positive, got {sigma}")))
            }
            MaskKind::Periodic { period, duty } if !(*period > 0.0 && (0.0..=1.0).contains(duty)) => {
                Err(ChurError::InvalidMask("periodic mask needs period > 0 and duty in [0, 1]".into()))
            }
            MaskKind::Tabulated(t) if t.values.len() < 2 || !(t.dx > 0.0) => {
                Err(ChurError::InvalidMask("tabulated mask needs two or more uniformly spaced samples".into()))
            }
            MaskKind::Tabulated(t) if t.values.iter().any(|v| v.norm() > 1.0 + 1e-12) => {
                Err(ChurError::InvalidMask("tabulated amplitude exceeds 1".into()))
            }
            _ => Ok(()),
        }
    }

    /// Transmittance M(x) = |𝒜(x)|² evaluated pointwise.
    pub fn transmittance(&self, x: f64) -> f64 {
        self.function(MaskResponse::Transmittance).eval(x).re
    }

    pub fn function(&self, response: MaskResponse) -> MaskFunction {
        let one = Complex64::new(1.0, 0.0);
        let base = match (&self.kind, response) {
            (MaskKind::TopHat { width }, _) => MaskFunction::Interval { lo: 0.0, hi: *width, height: one },
            (MaskKind::Gaussian { sigma }, MaskResponse::Transmittance) => {
                MaskFunction::Gaussian { center: 0.0, sigma: *sigma, height: one }
            }
            (MaskKind::Gaussian { sigma }, MaskResponse::Amplitude) => {
                MaskFunction::Gaussian { center: 0.0, sigma: sigma * std::f64::consts::SQRT_2, height: one }
            }
            (MaskKind::Periodic { period, duty }, _) => MaskFunction::Periodic { period: *period, width: duty * period },
            (MaskKind::Tabulated(t), MaskResponse::Transmittance) => MaskFunction::Linear {
                x0: t.x0,
                h: t.dx,
                values: t.values.iter().map(|v| Complex64::new(v.norm_sqr(), 0.0)).collect(),
            },
            (MaskKind::Tabulated(t), MaskResponse::Amplitude) => {
                MaskFunction::Linear { x0: t.x0, h: t.dx, values: t.values.clone() }
            }
        };
        match (&self.phase_profile, response, &base) {
            (Some(phase), MaskResponse::Amplitude, MaskFunction::Linear { x0, h, values }) => MaskFunction::Linear {
                x0: *x0,
                h: *h,
                values: values
                    .iter()
                    .enumerate()
                    .map(|(i, v)| v * Complex64::from_polar(1.0, phase.at(x0 + i as f64 * h)))
                    .collect(),
            },
            (Some(phase), MaskResponse::Amplitude, MaskFunction::Interval { .. } | MaskFunction::Gaussian { .. }) => {
                // resample A e^{iφ} on the phase lattice
                let values =
                    (0..phase.values.len()).map(|i| phase.x0 + i as f64 * phase.dx).map(|x| base.eval(x) * Complex64::from_polar(1.0, phase.at(x))).collect();
                MaskFunction::Linear { x0: phase.x0, h: phase.dx, values }
            }
            _ => base,
        }
    }
}

/// A concrete mask function with its transform.
#[derive(Debug, Clone, PartialEq)]
pub enum MaskFunction {
    Interval { lo: f64, hi: f64, height: Complex64 },
    Gaussian { center: f64, sigma: f64, height: Complex64 },
    Periodic { period: f64, width: f64 },
    /// Σ_j v_j hat((u − u_j)/h): linear between nodes, ramps to zero one step
    /// beyond the ends.
    Linear { x0: f64, h: f64, values: Vec<Complex64> },
}

fn sinc(t: f64) -> f64 {
    if t.abs() < 1e-4 {
        1.0 - t * t / 6.0
    } else {
        t.sin() / t
    }
}

impl MaskFunction {
    pub fn eval(&self, u: f64) -> Complex64 {
        match self {
            MaskFunction::Interval { lo, hi, height } => {
                if u >= *lo && u <= *hi && hi > lo {
                    *height
                } else {
                    Complex64::default()
                }
            }
            MaskFunction::Gaussian { center, sigma, height } => height * (-(u - center).powi(2) / (2.0 * sigma * sigma)).exp(),
            MaskFunction::Periodic { period, width } => {
                if (u.rem_euclid(*period)) < *width {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::default()
                }
            }
            MaskFunction::Linear { x0, h, values } => {
                let t = (u - x0) / h;
                let i = t.floor();
                let f = t - i;
                let at = |k: f64| -> Complex64 {
                    if k < 0.0 || k >= values.len() as f64 {
                        Complex64::default()
                    } else {
                        values[k as usize]
                    }
                };
                at(i) * (1.0 - f) + at(i + 1.0) * f
            }
        }
    }

    /// M̃(λ) = (2π)^{-1/2} ∫ e^{−iλu} M(u) du.
    pub fn transform(&self, lambda: f64) -> Result<Complex64> {
        Ok(match self {
            MaskFunction::Interval { lo, hi, height } => {
                let w = (hi - lo).max(0.0);
                height * Complex64::from_polar(INV_SQRT_2PI * w * sinc(0.5 * lambda * w), -0.5 * lambda * (lo + hi))
            }
            MaskFunction::Gaussian { center, sigma, height } => {
                height * Complex64::from_polar(sigma * (-0.5 * lambda * lambda * sigma * sigma).exp(), -lambda * center)
            }
            MaskFunction::Periodic { .. } => return Err(ChurError::NonIntegrableMask),
            MaskFunction::Linear { x0, h, values } => {
                let step = Complex64::from_polar(1.0, -lambda * h);
                let mut phase = Complex64::from_polar(1.0, -lambda * x0);
                let mut acc = Complex64::default();
                for v in values {
                    acc += v * phase;
                    phase *= step;
                }
                let s = sinc(0.5 * lambda * h);
                acc * (INV_SQRT_2PI * h * s * s)
            }
        })
    }

    /// M̃ at λ_k = start + k·step for k = 0..count. Tabulated masks go
    /// through a chirp-z transform instead of one node sum per λ.
    pub fn transform_grid(&self, start: f64, step: f64, count: usize) -> Result<Vec<Complex64>> {
        match self {
            MaskFunction::Linear { x0, h, values } => {
                let tilted: Vec<Complex64> =
                    values.iter().enumerate().map(|(j, v)| v * Complex64::from_polar(1.0, -start * j as f64 * h)).collect();
                let sums = fft::chirp_z(&tilted, step * h, count);
                Ok(sums
                    .into_iter()
                    .enumerate()
                    .map(|(k, d)| {
                        let lambda = start + k as f64 * step;
                        let s = sinc(0.5 * lambda * h);
                        d * Complex64::from_polar(INV_SQRT_2PI * h * s * s, -lambda * x0)
                    })
                    .collect())
            }
            _ => (0..count).map(|k| self.transform(start + k as f64 * step)).collect(),
        }
    }

    /// ∫|M|² du.
    pub fn l2_norm_sq(&self) -> Result<f64> {
        Ok(match self {
            MaskFunction::Interval { lo, hi, height } => height.norm_sqr() * (hi - lo).max(0.0),
            MaskFunction::Gaussian { sigma, height, .. } => height.norm_sqr() * sigma * PI.sqrt(),
            MaskFunction::Periodic { width, .. } if *width == 0.0 => 0.0,
            MaskFunction::Periodic { .. } => return Err(ChurError::NonIntegrableMask),
            MaskFunction::Linear { h, values, .. } => {
                let zero = Complex64::default();
                let padded = std::iter::once(&zero).chain(values.iter()).chain(std::iter::once(&zero));
                let nodes: Vec<&Complex64> = padded.collect();
                nodes
                    .windows(2)
                    .map(|w| (w[0].norm_sqr() + (w[0] * w[1].conj()).re + w[1].norm_sqr()) * h / 3.0)
                    .sum()
            }
        })
    }

    /// Interval outside which M vanishes (to below e^{-50} for Gaussians).
    pub fn support(&self) -> Option<(f64, f64)> {
        match self {
            MaskFunction::Interval { lo, hi, .. } => Some((*lo, hi.max(*lo))),
            MaskFunction::Gaussian { center, sigma, .. } => {
                Some((center - GAUSSIAN_REACH * sigma, center + GAUSSIAN_REACH * sigma))
            }
            MaskFunction::Periodic { .. } => None,
            MaskFunction::Linear { x0, h, values } => Some((x0 - h, x0 + values.len() as f64 * h)),
        }
    }

    pub fn scaled(&self, c: f64) -> MaskFunction {
        match self {
            MaskFunction::Interval { lo, hi, height } => MaskFunction::Interval { lo: *lo, hi: *hi, height: height * c },
            MaskFunction::Gaussian { center, sigma, height } => {
                MaskFunction::Gaussian { center: *center, sigma: *sigma, height: height * c }
            }
            MaskFunction::Periodic { .. } => self.clone(),
            MaskFunction::Linear { x0, h, values } => {
                MaskFunction::Linear { x0: *x0, h: *h, values: values.iter().map(|v| v * c).collect() }
            }
        }
    }

    /// Width of the narrowest feature, used to pick quadrature steps.
    fn feature_scale(&self) -> f64 {
        match self {
            MaskFunction::Interval { lo, hi, .. } => (hi - lo).max(1e-12),
            MaskFunction::Gaussian { sigma, .. } => *sigma,
            MaskFunction::Periodic { width, period } => width.min(period - width).max(1e-12),
            MaskFunction::Linear { h, values, .. } => h * (values.len() + 1) as f64,
        }
    }
}

/// A probability density sampled on a uniform lattice, Σ values·step = 1.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityGrid {
    pub origin: f64,
    pub step: f64,
    pub values: Vec<f64>,
}

impl DensityGrid {
    pub fn position(state: &StateVector) -> Self {
        let g = state.grid();
        Self { origin: g.x_min(), step: g.dx(), values: state.density() }
    }

    /// Density of u = κp.
    ///
    /// The state is zero-padded to twice its window first: ρ̃ carries
    /// conjugate frequencies up to the width of ψ, so the native momentum
    /// spacing would alias for states wider than half the window.
    pub fn scaled_momentum(state: &StateVector, kappa: f64) -> Self {
        let g = state.grid();
        let n = g.n_points();
        let wide = GridSpec::new(2 * n, 2.0 * g.length(), g.hbar(), g.center()).expect("doubling a valid grid");
        let mut amps = vec![Complex64::default(); 2 * n];
        amps[n / 2..n / 2 + n].copy_from_slice(state.amplitudes());
        let padded = StateVector::new(wide, amps).expect("padding preserves the norm");
        let mom = grid::to_momentum(&padded);
        Self { origin: kappa * wide.p(0), step: kappa * wide.dp(), values: mom.density().into_iter().map(|r| r / kappa).collect() }
    }

    fn span(&self) -> (f64, f64) {
        (self.origin, self.origin + self.values.len() as f64 * self.step)
    }

    fn moments(&self) -> grid::Moments {
        let o = self.origin;
        let s = self.step;
        grid::moments((0..self.values.len()).map(move |j| o + j as f64 * s), &self.values, s)
    }
}

/// Conjugate-domain samples of M̃(λ)Φ(λ) on the lattice λ_k = k·dλ and the
/// convolution they represent on y_m = y0 + m·step.
struct SpectralConvolution {
    y0: f64,
    step: f64,
    dlambda: f64,
    /// (λ_k, M̃(λ_k)Φ(λ_k)) with negligible terms dropped.
    terms: Vec<(f64, Complex64)>,
    lattice: Vec<Complex64>,
}

impl SpectralConvolution {
    fn new(mask: &MaskFunction, density: &DensityGrid) -> Result<Self> {
        let (m_lo, m_hi) = mask.support().ok_or(ChurError::NonIntegrableMask)?;
        let (r_lo, r_hi) = density.span();
        let (s_lo, s_hi) = (m_lo - r_hi, m_hi - r_lo);
        let n = density.values.len();
        let needed = ((s_hi - s_lo) / density.step).ceil() as usize + 2 * n;
        if needed > MAX_LATTICE {
            return Err(ChurError::DomainOverflow(format!(
                "mask support [{m_lo}, {m_hi}] needs {needed} lattice points at step {}",
                density.step
            )));
        }
        let p = needed.next_power_of_two();
        let step = density.step;
        let dlambda = 2.0 * PI / (p as f64 * step);
        let y0 = s_lo - n as f64 * step;

        let mut buf = vec![Complex64::default(); p];
        for (b, r) in buf.iter_mut().zip(&density.values) {
            b.re = *r;
        }
        fft::inverse(&mut buf);
        let half = p / 2;
        let transform = mask.transform_grid(-(half as f64) * dlambda, dlambda, p)?;
        let mut products = vec![Complex64::default(); p];
        let mut terms = Vec::new();
        let mut peak: f64 = 0.0;
        for (m, b) in buf.iter().enumerate() {
            let k = fft::signed_index(m, p);
            let lambda = k * dlambda;
            let phi = b * Complex64::from_polar(step, lambda * density.origin);
            let v = transform[(k as i64 + half as i64) as usize] * phi;
            peak = peak.max(v.norm());
            products[m] = v * Complex64::from_polar(1.0, lambda * y0);
            terms.push((lambda, v));
        }
        terms.retain(|(_, v)| v.norm() > 1e-20 * peak);
        fft::inverse(&mut products);
        let scale = dlambda * INV_SQRT_2PI;
        let lattice = products.into_iter().map(|v| v * scale).collect();
        Ok(Self { y0, step, dlambda, terms, lattice })
    }

    fn at(&self, y: f64) -> Complex64 {
        let span = self.lattice.len() as f64 * self.step;
        if y < self.y0 || y >= self.y0 + span {
            return Complex64::default();
        }
        self.terms.iter().map(|(l, v)| v * Complex64::from_polar(1.0, l * y)).sum::<Complex64>() * (self.dlambda * INV_SQRT_2PI)
    }

    fn l2_norm_sq(&self) -> f64 {
        self.lattice.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.step
    }
}

/// ∫ M(u + y) ρ(u) du for every y.
pub fn convolve(mask: &MaskFunction, density: &DensityGrid, ys: &[f64]) -> Result<Vec<Complex64>> {
    if let MaskFunction::Periodic { period, width } = mask {
        return convolve_periodic(*period, *width, density, ys);
    }
    let conv = SpectralConvolution::new(mask, density)?;
    Ok(ys.iter().map(|&y| conv.at(y)).collect())
}

fn convolve_periodic(period: f64, width: f64, density: &DensityGrid, ys: &[f64]) -> Result<Vec<Complex64>> {
    let tooth = MaskFunction::Interval { lo: 0.0, hi: width, height: Complex64::new(1.0, 0.0) };
    let conv = SpectralConvolution::new(&tooth, density)?;
    let (r_lo, r_hi) = density.span();
    Ok(ys
        .iter()
        .map(|&y| {
            // teeth m with [mT − y, mT + width − y] meeting the density window
            let m_lo = ((r_lo + y - width) / period).floor() as i64;
            let m_hi = ((r_hi + y) / period).ceil() as i64;
            (m_lo..=m_hi).map(|m| conv.at(y - m as f64 * period)).sum()
        })
        .collect())
}

/// Position readout 𝒬(y) for the transmittance of `mask`.
pub fn detect_position(mask: &MaskSpec, state: &StateVector, ys: &[f64]) -> Result<Vec<f64>> {
    mask.validate()?;
    let f = mask.function(MaskResponse::Transmittance);
    Ok(convolve(&f, &DensityGrid::position(state), ys)?.into_iter().map(|v| v.re).collect())
}

/// Momentum readout 𝒫(y) = ∫ M(κp + y) ρ̃(p) dp.
pub fn detect_momentum(mask: &MaskSpec, state: &StateVector, ys: &[f64]) -> Result<Vec<f64>> {
    mask.validate()?;
    let f = mask.function(MaskResponse::Transmittance);
    Ok(convolve(&f, &DensityGrid::scaled_momentum(state, mask.kappa), ys)?.into_iter().map(|v| v.re).collect())
}

/// Riemann-sum route Σ_j M(x_j + y) ρ_j dx; accurate for smooth masks only.
pub fn detect_position_direct(mask: &MaskSpec, state: &StateVector, ys: &[f64]) -> Result<Vec<f64>> {
    mask.validate()?;
    let f = mask.function(MaskResponse::Transmittance);
    let g = state.grid();
    let rho = state.density();
    Ok(ys
        .iter()
        .map(|&y| g.positions().zip(&rho).map(|(x, r)| f.eval(x + y).re * r).sum::<f64>() * g.dx())
        .collect())
}

/// Readouts on a common y grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DetectionProfile {
    pub y_samples: Vec<f64>,
    pub q_values: Vec<f64>,
    pub p_values: Vec<f64>,
}

/// One `y, q, p` row.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProfileRecord {
    pub y: f64,
    pub q: f64,
    pub p: f64,
}

impl DetectionProfile {
    pub fn records(&self) -> Vec<ProfileRecord> {
        self.y_samples
            .iter()
            .zip(&self.q_values)
            .zip(&self.p_values)
            .map(|((&y, &q), &p)| ProfileRecord { y, q, p })
            .collect()
    }
}

/// The default y grid: spacing dx, covering the mask support shifted against
/// both densities' mean ± 4 standard deviations.
pub fn default_y_grid(mask: &MaskSpec, state: &StateVector) -> Vec<f64> {
    let g = state.grid();
    let f = mask.function(MaskResponse::Transmittance);
    let (m_lo, m_hi) = f.support().unwrap_or((0.0, match mask.kind {
        MaskKind::Periodic { period, .. } => 2.0 * period,
        _ => 0.0,
    }));
    let pos = DensityGrid::position(state).moments();
    let mom = DensityGrid::scaled_momentum(state, mask.kappa).moments();
    let reach = |m: grid::Moments| 4.0 * m.variance.sqrt();
    let lo = (m_lo - pos.mean - reach(pos)).min(m_lo - mom.mean - reach(mom));
    let hi = (m_hi - pos.mean + reach(pos)).max(m_hi - mom.mean + reach(mom));
    let n = ((hi - lo) / g.dx()).ceil() as usize + 1;
    (0..n).map(|i| lo + i as f64 * g.dx()).collect()
}

pub fn detection_profile(mask: &MaskSpec, state: &StateVector, ys: Option<&[f64]>) -> Result<DetectionProfile> {
    let owned;
    let ys = match ys {
        Some(ys) => ys,
        None => {
            owned = default_y_grid(mask, state);
            &owned
        }
    };
    Ok(DetectionProfile {
        y_samples: ys.to_vec(),
        q_values: detect_position(mask, state, ys)?,
        p_values: detect_momentum(mask, state, ys)?,
    })
}

/// Pointwise comparison of the readout transforms with M̃Φ and M̃Φ̃(κ·).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransformIdentityReport {
    pub lambdas: Vec<f64>,
    pub max_error_q: f64,
    pub max_error_p: f64,
    pub holds: bool,
}

pub fn mask_transform_identity(mask: &MaskSpec, state: &StateVector, lambdas: &[f64]) -> Result<TransformIdentityReport> {
    mask.validate()?;
    let f = mask.function(MaskResponse::Transmittance);
    let q = SpectralConvolution::new(&f, &DensityGrid::position(state))?;
    let p = SpectralConvolution::new(&f, &DensityGrid::scaled_momentum(state, mask.kappa))?;
    let transform_of = |c: &SpectralConvolution, lambda: f64| -> Complex64 {
        c.lattice
            .iter()
            .enumerate()
            .map(|(m, v)| v * Complex64::from_polar(1.0, -lambda * (c.y0 + m as f64 * c.step)))
            .sum::<Complex64>()
            * (c.step * INV_SQRT_2PI)
    };
    let mut max_error_q: f64 = 0.0;
    let mut max_error_p: f64 = 0.0;
    for &lambda in lambdas {
        let mt = f.transform(lambda)?;
        max_error_q = max_error_q.max((transform_of(&q, lambda) - mt * state.char_position(lambda)).norm());
        max_error_p = max_error_p.max((transform_of(&p, lambda) - mt * state.char_momentum(mask.kappa * lambda)).norm());
    }
    Ok(TransformIdentityReport {
        lambdas: lambdas.to_vec(),
        max_error_q,
        max_error_p,
        holds: max_error_q <= tolerance::TRANSFORM && max_error_p <= tolerance::TRANSFORM,
    })
}

/// Right-hand side ∫|M̃(λ)|² B(ħκλ²) dλ and its ingredients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MaskBound {
    pub rhs: f64,
    /// ∫|M|² dx.
    pub l2_norm_sq: f64,
    /// Explicit integration range [−cutoff, cutoff].
    pub cutoff: f64,
    /// Mass of |M̃|² beyond the cutoff, credited with B ≥ 1.
    pub tail_mass: f64,
}

/// Evaluates the mask-side bound. |M̃|² B is integrated by the trapezoid rule
/// up to the point where |M̃|² falls below 1e-14 of its peak (or
/// [`LAMBDA_CAP`]); the remaining mass, known from Parseval, is counted with
/// B's minimum value 1, so the result never overstates the bound.
pub fn mask_bound(mask: &MaskFunction, hbar_kappa: f64) -> Result<MaskBound> {
    let l2 = mask.l2_norm_sq()?;
    if l2 == 0.0 {
        return Ok(MaskBound { rhs: 0.0, l2_norm_sq: 0.0, cutoff: 0.0, tail_mass: 0.0 });
    }
    let feature = mask.feature_scale();
    let coarse = (2.0 * PI / feature) / 64.0;
    let cutoff = spectral_cutoff(mask, coarse)?;
    let oscillation = if hbar_kappa * cutoff > 0.0 { PI / (hbar_kappa * cutoff) / 64.0 } else { f64::INFINITY };
    let dl = coarse.min(oscillation).min(cutoff / 64.0);
    let n = (cutoff / dl).ceil() as usize;
    let dl = cutoff / n as f64;
    let mut weighted = 0.0;
    let mut mass = 0.0;
    for (i, t) in mask.transform_grid(-cutoff, dl, 2 * n + 1)?.into_iter().enumerate() {
        let lambda = -cutoff + i as f64 * dl;
        let w = if i == 0 || i == 2 * n { 0.5 } else { 1.0 };
        let m2 = t.norm_sqr();
        weighted += w * m2 * chur::bound(hbar_kappa * lambda * lambda);
        mass += w * m2;
    }
    weighted *= dl;
    mass *= dl;
    let tail_mass = (l2 - mass).max(0.0);
    Ok(MaskBound { rhs: weighted + tail_mass, l2_norm_sq: l2, cutoff, tail_mass })
}

fn spectral_cutoff(mask: &MaskFunction, step: f64) -> Result<f64> {
    match mask {
        MaskFunction::Gaussian { sigma, .. } => Ok(((1.0 / TRUNCATION).ln().sqrt() / sigma).min(LAMBDA_CAP)),
        MaskFunction::Interval { .. } => Ok(LAMBDA_CAP),
        _ => {
            let peak = mask.transform(0.0)?.norm_sqr();
            let limit = match mask {
                MaskFunction::Linear { h, .. } => (PI / h).min(LAMBDA_CAP),
                _ => LAMBDA_CAP,
            };
            let count = (limit / step).floor() as usize + 1;
            let positive = mask.transform_grid(0.0, step, count)?;
            let negative = mask.transform_grid(0.0, -step, count)?;
            let mut last = step;
            let mut max_seen = peak;
            for (k, (a, b)) in positive.iter().zip(&negative).enumerate() {
                let v = a.norm_sqr().max(b.norm_sqr());
                max_seen = max_seen.max(v);
                if v >= TRUNCATION * max_seen {
                    last = k as f64 * step;
                }
            }
            Ok((last + 4.0 * step).min(limit))
        }
    }
}

/// Verdict of the mask uncertainty relation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MaskUrReport {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
    /// rhs ≤ 2∫|M|² (1 + 1e-6).
    pub cap_holds: bool,
    pub q_norm_sq: f64,
    pub p_norm_sq: f64,
    pub bound: MaskBound,
}

/// lhs = ∫(|𝒬|² + |𝒫|²) dy against rhs = ∫|M̃|² B(ħκλ²) dλ.
pub fn mask_uncertainty_relation(mask: &MaskSpec, state: &StateVector, response: MaskResponse) -> Result<MaskUrReport> {
    mask.validate()?;
    let f = mask.function(response);
    mask_relation_for(&f, mask.kappa, state, None)
}

/// Same as [`mask_uncertainty_relation`] with a precomputed mask bound, which
/// does not depend on the state.
pub fn mask_relation_for(f: &MaskFunction, kappa: f64, state: &StateVector, bound: Option<MaskBound>) -> Result<MaskUrReport> {
    let bound = match bound {
        Some(b) => b,
        None => mask_bound(f, state.grid().hbar() * kappa)?,
    };
    if bound.l2_norm_sq == 0.0 {
        return Ok(MaskUrReport { lhs: 0.0, rhs: 0.0, holds: true, cap_holds: true, q_norm_sq: 0.0, p_norm_sq: 0.0, bound });
    }
    let q_norm_sq = SpectralConvolution::new(f, &DensityGrid::position(state))?.l2_norm_sq();
    let p_norm_sq = SpectralConvolution::new(f, &DensityGrid::scaled_momentum(state, kappa))?.l2_norm_sq();
    let lhs = q_norm_sq + p_norm_sq;
    let rhs = bound.rhs;
    Ok(MaskUrReport {
        lhs,
        rhs,
        holds: lhs <= rhs * (1.0 + tolerance::MASK_RELATIVE),
        cap_holds: rhs <= 2.0 * bound.l2_norm_sq * (1.0 + tolerance::MASK_RELATIVE),
        q_norm_sq,
        p_norm_sq,
        bound,
    })
}

/// ∫|𝒬|² dy computed on the y lattice, for Parseval cross-checks.
pub fn readout_norm_sq(f: &MaskFunction, density: &DensityGrid) -> Result<f64> {
    Ok(SpectralConvolution::new(f, density)?.l2_norm_sq())
}

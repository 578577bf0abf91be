//! Variational search for the largest Λ at fixed γ within a state family.

pub mod nelder_mead;

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::charfunc::{char_momentum, char_position};
use crate::chur;
use crate::error::{ChurError, Result};
use crate::grid::GridSpec;
use crate::states::{make_comb, make_gaussian, CombSpec, GaussianSpec};
use crate::tolerance;

/// Parameterized state family with box bounds on its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Family {
    /// Centered Gaussian, parameter σx.
    Gaussian { sigma_min: f64, sigma_max: f64 },
    /// Comb with teeth w and envelope W; the period defaults to 2π/λx and the
    /// tooth count to ⌈3W/T⌉ per side.
    Comb {
        tooth_min: f64,
        tooth_max: f64,
        envelope_min: f64,
        envelope_max: f64,
        #[serde(default)]
        period: Option<f64>,
    },
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Gaussian { .. } => "gaussian",
            Family::Comb { .. } => "comb",
        }
    }

    pub fn default_gaussian() -> Self {
        Family::Gaussian { sigma_min: 0.1, sigma_max: 3.0 }
    }

    /// Bounds sized for [`comb_grid`] and period `period`.
    pub fn default_comb(period: f64) -> Self {
        let g = comb_grid();
        Family::Comb {
            tooth_min: (3.0 * g.dx()).max(0.005 * period),
            tooth_max: 0.25 * period,
            envelope_min: period,
            envelope_max: (0.9 * g.length() - 3.0 * period) / 14.0,
            period: None,
        }
    }

    fn bounds(&self) -> (Vec<f64>, Vec<f64>) {
        match *self {
            Family::Gaussian { sigma_min, sigma_max } => (vec![sigma_min], vec![sigma_max]),
            Family::Comb { tooth_min, tooth_max, envelope_min, envelope_max, .. } => {
                (vec![tooth_min, envelope_min], vec![tooth_max, envelope_max])
            }
        }
    }

    fn param_names(&self) -> &'static [&'static str] {
        match self {
            Family::Gaussian { .. } => &["sigma_x"],
            Family::Comb { .. } => &["tooth_sigma", "envelope_sigma"],
        }
    }

    fn validate(&self) -> Result<()> {
        let (lo, hi) = self.bounds();
        if lo.iter().zip(&hi).any(|(l, h)| !(l.is_finite() && h.is_finite() && *l > 0.0 && l <= h)) {
            return Err(ChurError::InvalidParameter(format!("{} family bounds must satisfy 0 < min ≤ max", self.name())));
        }
        if let Family::Comb { period: Some(t), .. } = self {
            if !(*t > 0.0) {
                return Err(ChurError::InvalidParameter("comb period must be positive".into()));
            }
        }
        Ok(())
    }
}

/// Grid used for the comb family: 2^16 points on a window of length 512.
pub fn comb_grid() -> GridSpec {
    GridSpec::new(1 << 16, 512.0, 1.0, 0.0).expect("valid grid")
}

/// How γ is split into (λx, λp) with ħλxλp = γ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum LambdaSplit {
    /// λx = |λp| = √(|γ|/ħ).
    #[default]
    Symmetric,
    /// λx/λp = ratio.
    Ratio { ratio: f64 },
}

impl LambdaSplit {
    pub fn split(&self, gamma: f64, hbar: f64) -> Result<(f64, f64)> {
        let sign = if gamma < 0.0 { -1.0 } else { 1.0 };
        let a = gamma.abs() / hbar;
        let (lx, lp) = match *self {
            LambdaSplit::Symmetric => (a.sqrt(), a.sqrt()),
            LambdaSplit::Ratio { ratio } if ratio.is_finite() && ratio > 0.0 => ((a * ratio).sqrt(), (a / ratio).sqrt()),
            LambdaSplit::Ratio { ratio } => {
                return Err(ChurError::InvalidParameter(format!("λ-split ratio must be positive, got {ratio}")))
            }
        };
        Ok((lx, sign * lp))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Budget {
    pub max_evaluations: usize,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Self { max_evaluations: 2000, restarts: 5, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TightnessQuery {
    pub gamma: f64,
    pub family: Family,
    pub lambda_split: LambdaSplit,
    pub budget: Budget,
    pub hbar: f64,
}

impl TightnessQuery {
    pub fn new(gamma: f64, family: Family) -> Self {
        Self { gamma, family, lambda_split: LambdaSplit::Symmetric, budget: Budget::default(), hbar: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TightnessResult {
    pub gamma: f64,
    pub lambda_x: f64,
    pub lambda_p: f64,
    pub best_lambda_big: f64,
    pub bound: f64,
    pub gap: f64,
    pub family: &'static str,
    pub best_params: BTreeMap<String, f64>,
    pub evaluations: usize,
    /// Some restart ran out of evaluations before converging.
    pub budget_exhausted: bool,
    /// Largest Λ over every evaluated point; never above B(γ) + 1e-9.
    pub max_iterate: f64,
}

impl TightnessResult {
    pub fn iterates_within_bound(&self) -> bool {
        self.max_iterate <= self.bound + tolerance::CHUR_VIOLATION
    }

    pub fn record(&self) -> TightnessRecord {
        let params = self.best_params.iter().map(|(k, v)| format!("\"{k}\":{v}")).collect::<Vec<_>>().join(",");
        TightnessRecord {
            gamma: self.gamma,
            bound: self.bound,
            best_lambda_big: self.best_lambda_big,
            gap: self.gap,
            family: self.family,
            params_json: format!("{{{params}}}"),
            evaluations: self.evaluations,
        }
    }
}

/// One `gamma, bound, best_lambda_big, gap, family, params_json, evaluations` row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TightnessRecord {
    pub gamma: f64,
    pub bound: f64,
    pub best_lambda_big: f64,
    pub gap: f64,
    pub family: &'static str,
    pub params_json: String,
    pub evaluations: usize,
}

/// Λ for family parameters `params` at (λx, λp).
fn objective(family: &Family, params: &[f64], lambda_x: f64, lambda_p: f64, hbar: f64) -> Result<f64> {
    let state = match *family {
        Family::Gaussian { .. } => {
            let g = GridSpec::standard().with_hbar(hbar)?;
            make_gaussian(&GaussianSpec::ground(params[0]), &g)?
        }
        Family::Comb { period, .. } => {
            let period = match period {
                Some(t) => t,
                None if lambda_x > 0.0 => 2.0 * PI / lambda_x,
                None => return Err(ChurError::InvalidParameter("comb family needs λx > 0 or an explicit period".into())),
            };
            let (w, envelope) = (params[0], params[1]);
            let spec = CombSpec {
                period,
                tooth_sigma: w,
                half_teeth: (3.0 * envelope / period).ceil() as usize,
                envelope_sigma: envelope,
            };
            make_comb(&spec, &comb_grid().with_hbar(hbar)?)?
        }
    };
    Ok(char_position(&state, lambda_x).norm_sqr() + char_momentum(&state, lambda_p).norm_sqr())
}

const SEEDS_PER_AXIS: [usize; 2] = [9, 7];

struct RestartOutcome {
    params: Vec<f64>,
    value: f64,
    evaluations: usize,
    exhausted: bool,
    max_iterate: f64,
}

/// Coarse lattice seeding followed by `restarts` simplex runs in parallel.
/// Restart 0 starts at the best seed; the others start at the next-best
/// seeds, jittered by a generator on their own ChaCha stream. The best value
/// wins, with ties going to the lowest restart index.
pub fn maximize_lambda(query: &TightnessQuery) -> Result<TightnessResult> {
    query.family.validate()?;
    if !(query.hbar > 0.0) {
        return Err(ChurError::InvalidParameter("ħ must be positive".into()));
    }
    let (lambda_x, lambda_p) = query.lambda_split.split(query.gamma, query.hbar)?;
    let gamma_eff = query.hbar * lambda_x * lambda_p;
    if (gamma_eff - query.gamma).abs() > 1e-12 * query.gamma.abs().max(1.0) {
        return Err(ChurError::InvalidParameter(format!("split gives γ = {gamma_eff}, expected {}", query.gamma)));
    }
    let bound = chur::bound(query.gamma);
    let (lo, hi) = query.family.bounds();
    let dim = lo.len();
    let to_params = |u: &[f64]| -> Vec<f64> { u.iter().zip(&lo).zip(&hi).map(|((t, l), h)| l + t * (h - l)).collect() };
    let value_at = |u: &[f64]| -> f64 {
        objective(&query.family, &to_params(u), lambda_x, lambda_p, query.hbar).unwrap_or(f64::NEG_INFINITY)
    };

    let per_axis = SEEDS_PER_AXIS[dim - 1];
    let lattice: Vec<Vec<f64>> = (0..per_axis.pow(dim as u32))
        .map(|i| (0..dim).map(|a| ((i / per_axis.pow(a as u32)) % per_axis) as f64 / (per_axis - 1) as f64).collect())
        .collect();
    let mut seeds: Vec<(usize, f64)> = lattice.par_iter().map(|u| value_at(u)).enumerate().collect();
    let seeding_evaluations = seeds.len();
    let seed_max = seeds.iter().map(|s| s.1).fold(f64::NEG_INFINITY, f64::max);
    seeds.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));

    let restarts = query.budget.restarts.max(1);
    let remaining = query.budget.max_evaluations.saturating_sub(seeding_evaluations);
    let per_restart = remaining / restarts;
    let step = 0.5 / (per_axis - 1) as f64;
    let outcomes: Vec<RestartOutcome> = (0..restarts)
        .into_par_iter()
        .map(|r| {
            let mut start = lattice[seeds[r % seeds.len()].0].clone();
            if r > 0 {
                let mut rng = ChaCha8Rng::seed_from_u64(query.budget.seed);
                rng.set_stream(r as u64);
                for v in start.iter_mut() {
                    *v = (*v + rng.random_range(-step..step)).clamp(0.0, 1.0);
                }
            }
            let mut max_iterate = f64::NEG_INFINITY;
            let out = nelder_mead::minimize(
                |u| {
                    let v = value_at(u);
                    max_iterate = max_iterate.max(v);
                    -v
                },
                &start,
                &vec![step; dim],
                &vec![0.0; dim],
                &vec![1.0; dim],
                nelder_mead::Options { max_evaluations: per_restart, ..Default::default() },
            );
            RestartOutcome {
                params: to_params(&out.x),
                value: -out.f,
                evaluations: out.evaluations,
                exhausted: !out.converged,
                max_iterate,
            }
        })
        .collect();

    let mut best = 0;
    for (i, o) in outcomes.iter().enumerate() {
        if o.value > outcomes[best].value {
            best = i;
        }
    }
    let winner = &outcomes[best];
    let (params, value) = if seeds[0].1 > winner.value {
        (to_params(&lattice[seeds[0].0]), seeds[0].1)
    } else {
        (winner.params.clone(), winner.value)
    };
    if !value.is_finite() {
        return Err(ChurError::InvalidParameter(format!("{} family admits no representable state in its bounds", query.family.name())));
    }
    let best_params = query.family.param_names().iter().zip(&params).map(|(n, v)| (n.to_string(), *v)).collect();
    Ok(TightnessResult {
        gamma: query.gamma,
        lambda_x,
        lambda_p,
        best_lambda_big: value,
        bound,
        gap: bound - value,
        family: query.family.name(),
        best_params,
        evaluations: seeding_evaluations + outcomes.iter().map(|o| o.evaluations).sum::<usize>(),
        budget_exhausted: outcomes.iter().any(|o| o.exhausted),
        max_iterate: outcomes.iter().map(|o| o.max_iterate).fold(seed_max, f64::max),
    })
}

/// Runs [`maximize_lambda`] for each distinct γ, in input order.
pub fn gap_profile(gammas: &[f64], template: &TightnessQuery) -> Result<Vec<TightnessResult>> {
    let mut seen: Vec<f64> = Vec::new();
    for &g in gammas {
        if !seen.iter().any(|s| s.to_bits() == g.to_bits()) {
            seen.push(g);
        }
    }
    seen.iter().map(|&gamma| maximize_lambda(&TightnessQuery { gamma, ..template.clone() })).collect()
}

//! One function per subcommand. Each writes its tables and returns the
//! verdicts; the caller writes the summary and picks the exit code.

use anyhow::{Context, Result};
use chur::charfunc::{self, CharFunctionRecord};
use chur::chur::{evaluate_chur, linspace, logspace, proof_chain_from, ChurRecord, ChurSweep};
use chur::grid::{self, GridSpec, Representation, StateVector};
use chur::io;
use chur::mask::{self, MaskKind, MaskResponse, MaskSpec, PhaseProfile};
use chur::protocols::{self, LqcScenario, QubitRecord, WeylPair};
use chur::states::StateSpec;
use chur::tightness::{self, Budget, Family, TightnessQuery};
use chur::ChurError;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{MaskShape, Response, RunConfig, StateConfig};
use crate::report::{Output, Report};

const CHUR_HEADER: [&str; 10] = [
    "lambda_x",
    "lambda_p",
    "gamma",
    "abs_phi",
    "abs_phi_tilde",
    "capital_lambda",
    "bound",
    "margin",
    "abs_omega",
    "gram_det",
];
const CHAR_HEADER: [&str; 4] = ["lambda", "re", "im", "abs"];

fn load_state(state: &StateConfig, grid: &GridSpec) -> Result<StateVector> {
    match (state.spec(), state) {
        (Some(spec), _) => Ok(spec.build(grid)?),
        (None, StateConfig::File { path }) => {
            io::read_state(path).with_context(|| format!("cannot load state file {}", path.display()))
        }
        (None, _) => unreachable!("only state files lack a spec"),
    }
}

fn describe_state(report: &mut Report, state: &StateVector) {
    let g = state.grid();
    report.value("state.grid", format!("n={} L={} hbar={} center={}", g.n_points(), g.length(), g.hbar(), g.center()));
    report.number("state.boundary_ratio", state.boundary_ratio());
}

/// Per-state line of the verify table.
#[derive(Debug, Serialize)]
struct VerifyRow {
    state: String,
    max_capital_lambda: f64,
    min_margin: f64,
    violations: usize,
    min_gram_det: f64,
    proof_chain_failures: usize,
    max_representation_error: f64,
    min_lower_bound_slack: f64,
}

pub fn verify(cfg: &RunConfig, out: &Output) -> Result<Report> {
    let grid = cfg.grid.spec()?;
    let v = &cfg.verify;
    let tol = &cfg.tolerance;
    let scale = cfg.debug.bound_scale;
    let sweep = ChurSweep::square(grid, v.lambda_max, v.lambda_points)?;
    let axis = linspace(-v.lambda_max, v.lambda_max, v.lambda_points);

    let mut specs = vec![("ground".to_string(), StateSpec::Gaussian { sigma_x: 1.0, center_x: 0.0, center_p: 0.0 })];
    for i in 0..v.n_states as u64 {
        let seed = cfg.seed.wrapping_add(i);
        specs.push((format!("random:{seed}"), StateSpec::Random { n_modes: v.n_modes, mode_scale: 1.0, seed }));
    }

    let rows = specs
        .par_iter()
        .map(|(name, spec)| -> Result<VerifyRow> {
            let state = spec.build(&grid)?;
            let outcome = sweep.evaluate(&state)?;
            let mut row = VerifyRow {
                state: name.clone(),
                max_capital_lambda: f64::NEG_INFINITY,
                min_margin: f64::INFINITY,
                violations: 0,
                min_gram_det: f64::INFINITY,
                proof_chain_failures: 0,
                max_representation_error: 0.0,
                min_lower_bound_slack: f64::INFINITY,
            };
            for e in &outcome.evaluations {
                let b = scale * e.bound;
                row.max_capital_lambda = row.max_capital_lambda.max(e.capital_lambda);
                row.min_margin = row.min_margin.min(b - e.capital_lambda);
                if e.capital_lambda > b + tol.chur_violation {
                    row.violations += 1;
                }
                row.min_gram_det = row.min_gram_det.min(e.gram_det.unwrap_or(f64::NAN));
                if !proof_chain_from(*e).all_passed() {
                    row.proof_chain_failures += 1;
                }
            }
            for &l in &axis {
                let direct = charfunc::char_position(&state, l);
                let autocorr = charfunc::char_momentum_autocorr(&state, l)?;
                row.max_representation_error = row.max_representation_error.max((direct - autocorr).norm());
                for rep in [Representation::Position, Representation::Momentum] {
                    let lb = charfunc::lower_bound_check(&state, l, rep);
                    row.min_lower_bound_slack = row.min_lower_bound_slack.min(lb.centered_re_phi - lb.bound);
                }
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;

    out.table(
        "verify.csv",
        &[
            "state",
            "max_capital_lambda",
            "min_margin",
            "violations",
            "min_gram_det",
            "proof_chain_failures",
            "max_representation_error",
            "min_lower_bound_slack",
        ],
        &rows,
    )?;

    let fold = |f: fn(&VerifyRow) -> f64, init: f64, pick: fn(f64, f64) -> f64| rows.iter().map(f).fold(init, pick);
    let violations: usize = rows.iter().map(|r| r.violations).sum();
    let chain_failures: usize = rows.iter().map(|r| r.proof_chain_failures).sum();
    let min_det = fold(|r| r.min_gram_det, f64::INFINITY, f64::min);
    let max_repr = fold(|r| r.max_representation_error, 0.0, f64::max);
    let min_slack = fold(|r| r.min_lower_bound_slack, f64::INFINITY, f64::min);

    let mut report = Report::default();
    report.value("states", rows.len());
    report.value("lambda_points_per_state", sweep.lambda_x().len() * sweep.lambda_p().len());
    report.number("max_capital_lambda", fold(|r| r.max_capital_lambda, f64::NEG_INFINITY, f64::max));
    report.number("min_margin", fold(|r| r.min_margin, f64::INFINITY, f64::min));
    report.value("violations", violations);
    report.check("relation", violations == 0);
    report.number("min_gram_det", min_det);
    report.check("gram_psd", min_det >= -tol.gram);
    report.value("proof_chain_failures", chain_failures);
    report.check("proof_chain", chain_failures == 0);
    report.number("max_representation_error", max_repr);
    report.check("representation_identity", max_repr <= tol.transform);
    report.number("min_lower_bound_slack", min_slack);
    report.check("lower_bound", min_slack >= -tol.lower_bound);
    Ok(report)
}

#[derive(Debug, Serialize)]
struct FigureRow {
    gamma: f64,
    bound: f64,
    gaussian_lambda: f64,
}

pub fn figure1(cfg: &RunConfig, out: &Output) -> Result<Report> {
    let f = &cfg.figure1;
    let grid = cfg.grid.spec()?;
    let a_values = match &f.a_values {
        Some(values) => values.clone(),
        None => logspace(f.a_min, f.a_max, f.points),
    };
    let state = StateSpec::Gaussian { sigma_x: f.sigma_x, center_x: 0.0, center_p: 0.0 }.build(&grid)?;
    let hbar = grid.hbar();
    let sx = grid::variance(&state, Representation::Position).sqrt();
    let sp = grid::variance(&state, Representation::Momentum).sqrt();
    // a = λx λp ħ with λx = √a/b, λp = b√a/ħ and b² = ħσx/σp
    let b = (hbar * sx / sp).sqrt();
    let rows = a_values
        .par_iter()
        .map(|&a| -> Result<FigureRow> {
            let e = evaluate_chur(&state, a.sqrt() / b, b * a.sqrt() / hbar)?;
            Ok(FigureRow { gamma: a, bound: chur::chur::bound(a), gaussian_lambda: e.capital_lambda })
        })
        .collect::<Result<Vec<_>>>()?;
    out.table("figure1.csv", &["gamma", "bound", "gaussian_lambda"], &rows)?;

    let scale = cfg.debug.bound_scale;
    let tol = cfg.tolerance.chur_violation;
    let worst = rows.iter().map(|r| r.gaussian_lambda - scale * r.bound).fold(f64::NEG_INFINITY, f64::max);
    let closed_form = rows.iter().map(|r| (r.gaussian_lambda - 2.0 * (-0.5 * r.gamma).exp()).abs()).fold(0.0, f64::max);
    let mut report = Report::default();
    report.value("points", rows.len());
    report.number("b", b);
    report.number("max_excess_over_bound", if rows.is_empty() { 0.0 } else { worst });
    report.number("max_deviation_from_2exp(-a/2)", closed_form);
    report.check("gaussian_below_bound", rows.iter().all(|r| r.gaussian_lambda <= scale * r.bound + tol));
    Ok(report)
}

pub fn sweep(cfg: &RunConfig, out: &Output) -> Result<Report> {
    let s = &cfg.sweep;
    let state = load_state(&s.state, &cfg.grid.spec()?)?;
    let sweep = ChurSweep::square(*state.grid(), s.lambda_max, s.lambda_points)?;
    let outcome = sweep.evaluate(&state)?;
    let records: Vec<ChurRecord> = outcome.evaluations.iter().map(|e| e.record()).collect();
    out.table("sweep.csv", &CHUR_HEADER, &records)?;
    for (name, rep) in [("position", Representation::Position), ("momentum", Representation::Momentum)] {
        let samples = charfunc::char_sweep(&state, rep, sweep.lambda_x());
        let rows: Vec<CharFunctionRecord> = samples.into_iter().map(Into::into).collect();
        out.table(&format!("sweep_char_{name}.csv"), &CHAR_HEADER, rows)?;
    }

    let scale = cfg.debug.bound_scale;
    let tol = &cfg.tolerance;
    let violations = outcome.evaluations.iter().filter(|e| e.capital_lambda > scale * e.bound + tol.chur_violation).count();
    let min_det = outcome.evaluations.iter().filter_map(|e| e.gram_det).fold(f64::INFINITY, f64::min);
    let mut report = Report::default();
    describe_state(&mut report, &state);
    report.number("var_x", outcome.var_x);
    report.number("var_p", outcome.var_p);
    report.value("points", records.len());
    report.number("max_capital_lambda", records.iter().map(|r| r.capital_lambda).fold(f64::NEG_INFINITY, f64::max));
    report.value("violations", violations);
    report.check("relation", violations == 0);
    report.number("min_gram_det", min_det);
    report.check("gram_psd", min_det >= -tol.gram);
    Ok(report)
}

fn mask_spec(cfg: &RunConfig) -> Result<MaskSpec> {
    let m = &cfg.mask;
    let kind = match &m.shape {
        MaskShape::TopHat { width } => MaskKind::TopHat { width: *width },
        MaskShape::Gaussian { sigma } => MaskKind::Gaussian { sigma: *sigma },
        MaskShape::Periodic { period, duty } => MaskKind::Periodic { period: *period, duty: *duty },
        MaskShape::Tabulated { path } => MaskKind::Tabulated(
            io::read_mask_table(path).with_context(|| format!("cannot load mask table {}", path.display()))?,
        ),
    };
    let mut spec = MaskSpec::new(kind, m.kappa)?;
    if let Some(path) = &m.phase_path {
        let table = io::read_mask_table(path).with_context(|| format!("cannot load phase table {}", path.display()))?;
        spec = spec.with_phase(PhaseProfile::from_table(&table))?;
    }
    Ok(spec)
}

pub fn mask(cfg: &RunConfig, out: &Output) -> Result<Report> {
    let spec = mask_spec(cfg)?;
    let state = load_state(&cfg.mask.state, &cfg.grid.spec()?)?;
    let ys = match (cfg.mask.y_min, cfg.mask.y_max, cfg.mask.y_points) {
        (Some(lo), Some(hi), Some(n)) => Some(linspace(lo, hi, n)),
        _ => None,
    };
    let profile = mask::detection_profile(&spec, &state, ys.as_deref())?;
    out.table("mask_profile.csv", &["y", "q", "p"], profile.records())?;

    let mut report = Report::default();
    describe_state(&mut report, &state);
    report.value("profile_points", profile.y_samples.len());
    let response = match cfg.mask.response {
        Response::Transmittance => MaskResponse::Transmittance,
        Response::Amplitude => MaskResponse::Amplitude,
    };
    let rel = cfg.tolerance.mask_relative;
    let scale = cfg.debug.bound_scale;
    match mask::mask_uncertainty_relation(&spec, &state, response) {
        Ok(ur) => {
            report.number("lhs", ur.lhs);
            report.number("rhs", ur.rhs);
            report.number("q_norm_sq", ur.q_norm_sq);
            report.number("p_norm_sq", ur.p_norm_sq);
            report.number("mask_l2_norm_sq", ur.bound.l2_norm_sq);
            report.number("spectral_cutoff", ur.bound.cutoff);
            report.number("tail_mass", ur.bound.tail_mass);
            report.check("mask_relation", ur.lhs <= scale * ur.rhs * (1.0 + rel));
            report.check("rhs_cap", ur.rhs <= 2.0 * ur.bound.l2_norm_sq * (1.0 + rel));
            let lambdas = linspace(-5.0, 5.0, 21);
            let identity = mask::mask_transform_identity(&spec, &state, &lambdas)?;
            report.number("transform_identity_error_q", identity.max_error_q);
            report.number("transform_identity_error_p", identity.max_error_p);
            report.check(
                "transform_identity",
                identity.max_error_q <= cfg.tolerance.transform && identity.max_error_p <= cfg.tolerance.transform,
            );
        }
        Err(ChurError::NonIntegrableMask) => {
            report.value("mask_relation", "not applicable (mask is not square integrable)");
        }
        Err(e) => return Err(e.into()),
    }
    Ok(report)
}

pub fn qubit(cfg: &RunConfig, out: &Output) -> Result<Report> {
    let q = &cfg.qubit;
    let state = load_state(&q.state, &cfg.grid.spec()?)?;
    let lambdas = linspace(q.lambda_min, q.lambda_max, q.points);
    let tol = &cfg.tolerance;
    let mut report = Report::default();
    describe_state(&mut report, &state);

    let exact = lambdas.iter().map(|&l| protocols::qubit_exact(&state, l)).collect::<Result<Vec<_>, _>>()?;
    let recon = exact
        .iter()
        .map(|r| (r.reconstructed - charfunc::char_momentum(&state, r.lambda_p)).norm())
        .fold(0.0, f64::max);
    let sums = exact
        .iter()
        .map(|r| (r.p_plus + r.p_minus - 1.0).abs().max((r.p_plus_i + r.p_minus_i - 1.0).abs()))
        .fold(0.0, f64::max);
    report.number("max_reconstruction_error", recon);
    report.check("reconstruction", recon <= tol.reconstruction);
    report.number("max_probability_sum_error", sums);
    report.check("probability_sums", sums <= tol.identity);

    let records: Vec<QubitRecord> = if q.shots == 0 {
        exact.iter().map(QubitRecord::from).collect()
    } else {
        let sampled = lambdas
            .iter()
            .enumerate()
            .map(|(i, &l)| protocols::qubit_sampled(&state, l, q.shots, cfg.seed.wrapping_add(i as u64)))
            .collect::<Result<Vec<_>, _>>()?;
        let limit = 5.0 / (q.shots as f64).sqrt();
        let worst = sampled.iter().map(|s| (s.estimate.reconstructed - s.exact.reconstructed).norm()).fold(0.0, f64::max);
        report.value("shots", q.shots);
        report.number("max_sampling_error", worst);
        report.number("sampling_limit", limit);
        report.check("sampling_within_limit", worst <= limit);
        sampled.iter().map(QubitRecord::from).collect()
    };
    out.table(
        "qubit.csv",
        &["lambda_p", "p_plus", "p_minus", "p_plus_i", "p_minus_i", "re_est", "im_est", "stderr"],
        &records,
    )?;
    Ok(report)
}

pub fn finite_dim(cfg: &RunConfig, out: &Output) -> Result<Report> {
    let f = &cfg.finite_dim;
    let mut records = Vec::with_capacity(f.dimensions.len());
    for &d in &f.dimensions {
        let pair = WeylPair::clock_shift(d)?;
        records.push(protocols::finite_dim_scan(&pair, f.samples, cfg.seed)?);
    }
    out.table("finite_dim.csv", &["d", "phi", "lhs_max", "bound"], &records)?;

    let scale = cfg.debug.bound_scale;
    let mut report = Report::default();
    report.value("samples_per_dimension", f.samples);
    for r in &records {
        report.number(&format!("d{}.lhs_max", r.d), r.lhs_max);
        report.number(&format!("d{}.bound", r.d), r.bound);
    }
    report.check("relation", records.iter().all(|r| r.lhs_max <= scale * r.bound + cfg.tolerance.finite_dim));
    Ok(report)
}

pub fn lqc(cfg: &RunConfig, out: &Output) -> Result<Report> {
    let l = &cfg.lqc;
    let state = load_state(&l.state, &cfg.grid.spec()?)?;
    let reports = l
        .lambda_b
        .iter()
        .map(|&lambda_b| protocols::lqc_bound_check(&LqcScenario { q_constant: l.q_constant, lambda_b, state_v: state.clone() }))
        .collect::<Result<Vec<_>, _>>()?;
    out.table(
        "lqc.csv",
        &[
            "lambda_b",
            "lambda_v",
            "sigma_v",
            "abs_u_b",
            "rhs",
            "holds",
            "bound_at_pi",
            "abs_phi_v",
            "intermediate_holds",
        ],
        &reports,
    )?;

    let tol = cfg.tolerance.chur_violation;
    let scale = cfg.debug.bound_scale;
    let mut report = Report::default();
    describe_state(&mut report, &state);
    for r in &reports {
        report.number(&format!("lambda_b={}.sigma_v", r.lambda_b), r.sigma_v);
        report.number(&format!("lambda_b={}.rhs", r.lambda_b), r.rhs);
    }
    report.check("volume_fluctuation_bound", reports.iter().all(|r| r.sigma_v >= r.rhs - tol));
    report.check(
        "intermediate_step",
        reports.iter().all(|r| r.abs_u_b.powi(2) + r.abs_phi_v.powi(2) <= scale * r.bound_at_pi + tol),
    );
    Ok(report)
}

pub fn tightness(cfg: &RunConfig, out: &Output) -> Result<Report> {
    let t = &cfg.tightness;
    let family = t.family.unwrap_or_else(Family::default_gaussian);
    let template = TightnessQuery {
        gamma: 0.0,
        family,
        lambda_split: t.split,
        budget: Budget { max_evaluations: t.max_evaluations, restarts: t.restarts, seed: cfg.seed },
        hbar: cfg.grid.hbar,
    };
    let results = tightness::gap_profile(&t.gammas, &template)?;
    let records: Vec<_> = results.iter().map(|r| r.record()).collect();
    out.table(
        "tightness.csv",
        &["gamma", "bound", "best_lambda_big", "gap", "family", "params_json", "evaluations"],
        &records,
    )?;

    let scale = cfg.debug.bound_scale;
    let tol = cfg.tolerance.chur_violation;
    let mut report = Report::default();
    report.value("family", family.name());
    report.value("gammas", results.len());
    report.value("budget_exhausted", results.iter().filter(|r| r.budget_exhausted).count());
    report.number("min_gap", results.iter().map(|r| r.gap).fold(f64::INFINITY, f64::min));
    report.check("iterates_within_bound", results.iter().all(|r| r.max_iterate <= scale * r.bound + tol));
    Ok(report)
}

//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
//! the process exits non-zero if any fails.

mod common;

use std::f64::consts::PI;
use std::time::Instant;

use chur::charfunc::{char_momentum, char_momentum_autocorr, char_position, lower_bound_from};
use chur::chur::{bound, bound_literal, evaluate_chur, hur_comparison, linspace, logspace, small_gamma_slope, ChurSweep};
use chur::grid::{GridSpec, StateVector};
use chur::mask::{mask_bound, mask_relation_for, MaskKind, MaskResponse, MaskSpec};
use chur::protocols::weyl::finite_dim_scan;
use chur::protocols::{lqc_bound_check, qubit_exact, qubit_sampled, LqcScenario, WeylPair};
use chur::states::{make_comb, make_gaussian, make_random, CombSpec, GaussianSpec, RandomStateSpec};
use common::{ground, random_smooth_mask, random_state};
use rayon::prelude::*;

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: String) -> Verdict {
    Verdict { passed, detail }
}

/// Worst lower-bound margin Re Φ − (1 − λ²σ²/2) seen by the sweeps of
/// criteria 2 and 3, shared with criterion 11.
#[derive(Default)]
struct LowerBoundTally {
    worst: f64,
    checks: usize,
}

impl LowerBoundTally {
    fn add(&mut self, re_phi: f64, variance: f64, lambda: f64) {
        let c = lower_bound_from(re_phi, variance, lambda);
        let margin = c.re_phi - c.bound;
        if self.checks == 0 || margin < self.worst {
            self.worst = margin;
        }
        self.checks += 1;
    }
}

fn bound_values() -> Verdict {
    let exact = bound(0.0) == 2.0 && bound(2.0 * PI) == 2.0 && bound(PI) == 1.0;
    let mut worst: f64 = 0.0;
    let mut used = 0;
    for i in 0..10_000 {
        let gamma = -20.0 + 40.0 * (i as f64 + 0.5) / 10_000.0;
        if (1.0 + gamma.cos()).abs() > 1e-3 {
            worst = worst.max((bound(gamma) - bound_literal(gamma)).abs());
            used += 1;
        }
    }
    verdict(
        exact && worst <= 1e-12,
        format!("B(0)={}, B(2pi)={}, B(pi)={}; max |stable - literal| = {worst:.2e} over {used} samples", bound(0.0), bound(2.0 * PI), bound(PI)),
    )
}

/// Per state: violations, min(B − Λ), min det G, and (Re Φ, variance, λ) samples.
type StateSweep = (usize, f64, f64, Vec<(f64, f64, f64)>);

fn property_suite(tally: &mut LowerBoundTally) -> Verdict {
    let g = GridSpec::standard();
    let sweep = ChurSweep::square(g, 5.0, 21).unwrap();
    let results: Vec<StateSweep> = (0..1000u64)
        .into_par_iter()
        .map(|seed| {
            let state = make_random(&RandomStateSpec::new(seed), &g).unwrap();
            let out = sweep.evaluate(&state).unwrap();
            let violations = out.evaluations.iter().filter(|e| e.capital_lambda > e.bound + 1e-9).count();
            let worst_margin = out.evaluations.iter().map(|e| e.margin()).fold(f64::INFINITY, f64::min);
            let min_det = out.evaluations.iter().map(|e| e.gram_det.unwrap()).fold(f64::INFINITY, f64::min);
            let n_p = sweep.lambda_p().len();
            let mut lb = Vec::new();
            for (ix, &lx) in sweep.lambda_x().iter().enumerate() {
                lb.push((out.evaluations[ix * n_p].phi.re, out.var_x, lx));
            }
            for (ip, &lp) in sweep.lambda_p().iter().enumerate() {
                lb.push((out.evaluations[ip].phi_tilde.re, out.var_p, lp));
            }
            (violations, worst_margin, min_det, lb)
        })
        .collect();
    let violations: usize = results.iter().map(|r| r.0).sum();
    let worst_margin = results.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    let min_det = results.iter().map(|r| r.2).fold(f64::INFINITY, f64::min);
    for (re, var, l) in results.iter().flat_map(|r| r.3.iter().copied()) {
        tally.add(re, var, l);
    }
    verdict(
        violations == 0 && min_det >= -1e-10,
        format!("1000 states x 441 points: {violations} violations, min(B - Lambda) = {worst_margin:.3e}, min det G = {min_det:.3e}"),
    )
}

fn figure_one_gaussian(tally: &mut LowerBoundTally) -> Verdict {
    let state = ground();
    let report = hur_comparison(&state, &[1.0]).unwrap();
    let b = report.b;
    let (var_x, var_p) = (report.sigma_x.powi(2), report.sigma_p.powi(2));
    let mut worst: f64 = 0.0;
    for a in logspace(0.01, 10.0, 50) {
        let (lx, lp) = (a.sqrt() / b, b * a.sqrt());
        let e = evaluate_chur(&state, lx, lp).unwrap();
        worst = worst.max((e.capital_lambda - 2.0 * (-a / 2.0).exp()).abs());
        tally.add(e.phi.re, var_x, lx);
        tally.add(e.phi_tilde.re, var_p, lp);
    }
    verdict(worst <= 1e-6, format!("50 log-spaced a in [0.01, 10]: max |Lambda - 2 exp(-a/2)| = {worst:.2e}"))
}

fn heisenberg_limit() -> Verdict {
    let slope = small_gamma_slope(1e-3);
    let g = GridSpec::standard();
    let mut states: Vec<StateVector> = (0..100).map(random_state).collect();
    states.push(make_comb(&CombSpec { period: 2.0, tooth_sigma: 0.3, half_teeth: 3, envelope_sigma: 3.0 }, &g).unwrap());
    let worst_excess = states
        .par_iter()
        .map(|s| {
            let r = hur_comparison(s, &[1e-3]).unwrap();
            r.product - r.half_hbar
        })
        .reduce(|| f64::INFINITY, f64::min);
    let gaussians = [
        GaussianSpec::ground(1.0),
        GaussianSpec { sigma_x: 0.6, center_x: 1.0, center_p: -2.0 },
        GaussianSpec { sigma_x: 2.2, center_x: -0.5, center_p: 0.5 },
    ];
    let gaussian_gap = gaussians
        .iter()
        .map(|spec| {
            let r = hur_comparison(&make_gaussian(spec, &g).unwrap(), &[1e-3]).unwrap();
            (r.product - r.half_hbar).abs()
        })
        .fold(0.0, f64::max);
    verdict(
        (slope - 1.0).abs() <= 2e-3 && worst_excess >= -1e-9 && gaussian_gap <= 1e-9,
        format!(
            "(2 - B(a))/a at a=1e-3 = {slope:.6}; min(sigma_x sigma_p - hbar/2) over 101 states = {worst_excess:.3e}; Gaussian |product - hbar/2| <= {gaussian_gap:.2e}"
        ),
    )
}

fn comb_saturation() -> Verdict {
    let g = GridSpec::new(1 << 17, 280.0, 1.0, 0.0).unwrap();
    let t = 1.0;
    let state = make_comb(&CombSpec { period: t, tooth_sigma: t / 200.0, half_teeth: 50, envelope_sigma: 20.0 * t }, &g).unwrap();
    let (lx, lp) = (2.0 * PI / t, t);
    let lam = char_position(&state, lx).norm_sqr() + char_momentum(&state, lp).norm_sqr();
    let b = bound(lx * lp);
    verdict(lam >= 1.99 && lam <= b + 1e-9, format!("T=1, w=T/200, K=50, W=20T at gamma=2pi: Lambda = {lam:.6}, B = {b}"))
}

fn representation_identity() -> Verdict {
    let lambdas = linspace(-5.0, 5.0, 21);
    let mut states = vec![ground()];
    states.extend((0..100).map(|s| random_state(1000 + s)));
    let worst = states
        .par_iter()
        .map(|s| {
            lambdas
                .iter()
                .map(|&l| (char_position(s, l) - char_momentum_autocorr(s, l).unwrap()).norm())
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max);
    verdict(worst <= 1e-8, format!("Gaussian + 100 random states, 21 lambdas: max |direct - autocorrelation| = {worst:.2e}"))
}

fn qubit_protocol() -> Verdict {
    let lambdas = linspace(-5.0, 5.0, 21);
    let states = [ground(), random_state(7), random_state(8)];
    let mut recon: f64 = 0.0;
    let mut sums: f64 = 0.0;
    for s in &states {
        for &l in &lambdas {
            let r = qubit_exact(s, l).unwrap();
            recon = recon.max((r.reconstructed - char_momentum(s, l)).norm());
            sums = sums.max((r.p_plus + r.p_minus - 1.0).abs()).max((r.p_plus_i + r.p_minus_i - 1.0).abs());
        }
    }
    let shots = 1_000_000u64;
    let limit = 5.0 / (shots as f64).sqrt();
    let mut sampled: f64 = 0.0;
    for (s, l) in [(&states[0], 1.0), (&states[1], 2.3)] {
        for seed in 0..3 {
            let r = qubit_sampled(s, l, shots, seed).unwrap();
            sampled = sampled.max((r.estimate.reconstructed - r.exact.reconstructed).norm());
        }
    }
    verdict(
        recon <= 1e-10 && sums <= 1e-12 && sampled <= limit,
        format!("max reconstruction error {recon:.2e}; probability sums off by {sums:.1e}; 1e6-shot error {sampled:.2e} (limit {limit:.1e})"),
    )
}

fn mask_relation() -> Verdict {
    let mut masks: Vec<(String, MaskSpec, MaskResponse)> = vec![
        ("top-hat".into(), MaskSpec::new(MaskKind::TopHat { width: 1.0 }, 1.0).unwrap(), MaskResponse::Transmittance),
        ("gaussian".into(), MaskSpec::new(MaskKind::Gaussian { sigma: 1.0 }, 1.0).unwrap(), MaskResponse::Transmittance),
    ];
    for seed in 0..20 {
        masks.push((format!("complex-{seed}"), random_smooth_mask(seed), MaskResponse::Amplitude));
    }
    let mut states = vec![ground()];
    states.extend((0..20).map(|s| random_state(2000 + s)));
    let rows: Vec<(bool, bool, f64)> = masks
        .par_iter()
        .flat_map(|(_, spec, response)| {
            let f = spec.function(*response);
            let b = mask_bound(&f, spec.kappa).unwrap();
            states
                .par_iter()
                .map(|s| {
                    let r = mask_relation_for(&f, spec.kappa, s, Some(b)).unwrap();
                    (r.holds, r.cap_holds, r.lhs / r.rhs)
                })
                .collect::<Vec<_>>()
        })
        .collect();
    let failures = rows.iter().filter(|r| !r.0).count();
    let cap_failures = rows.iter().filter(|r| !r.1).count();
    let tightest = rows.iter().map(|r| r.2).fold(0.0, f64::max);
    verdict(
        failures == 0 && cap_failures == 0,
        format!("{} mask/state pairs: {failures} lhs > rhs, {cap_failures} rhs > 2|M|^2; largest lhs/rhs = {tightest:.4}", rows.len()),
    )
}

fn finite_dimension() -> Verdict {
    let mut ok = true;
    let mut parts = Vec::new();
    for d in [2usize, 3, 4, 8, 16, 64] {
        let pair = WeylPair::clock_shift(d).unwrap();
        let rec = finite_dim_scan(&pair, 100_000, d as u64).unwrap();
        ok &= rec.lhs_max <= rec.bound + 1e-12;
        if d == 2 {
            ok &= rec.lhs_max >= 1.0 - 1e-6;
        }
        parts.push(format!("d={d}: {:.7}/{:.4}", rec.lhs_max, rec.bound));
    }
    verdict(ok, format!("max lhs / bound over 1e5 states: {}", parts.join(", ")))
}

fn lqc_chain() -> Verdict {
    let g = GridSpec::new(4096, 64.0, 1.0, 0.0).unwrap();
    let mut states: Vec<StateVector> =
        linspace(0.5, 3.0, 25).into_iter().map(|s| make_gaussian(&GaussianSpec::ground(s), &g).unwrap()).collect();
    states.extend((0..25).map(|s| make_random(&RandomStateSpec::new(3000 + s), &g).unwrap()));
    let mut worst_main = f64::INFINITY;
    let mut worst_step = f64::INFINITY;
    let mut ok = true;
    for s in &states {
        for lb in [0.1, 1.0, 10.0] {
            let r = lqc_bound_check(&LqcScenario { q_constant: 1.0, lambda_b: lb, state_v: s.clone() }).unwrap();
            ok &= r.holds && r.intermediate_holds && r.bound_at_pi == 1.0;
            worst_main = worst_main.min(r.sigma_v - r.rhs);
            worst_step = worst_step.min(1.0 - r.abs_phi_v.powi(2) - r.abs_u_b.powi(2));
        }
    }
    verdict(
        ok,
        format!("50 states x 3 lambda_b: min(sigma_V - rhs) = {worst_main:.3e}, min(1 - |Phi_V|^2 - |U_b|^2) = {worst_step:.3e}"),
    )
}

fn lower_bound(tally: &LowerBoundTally) -> Verdict {
    verdict(
        tally.worst >= -1e-10,
        format!("{} checks from criteria 2 and 3: min(Re Phi - (1 - lambda^2 sigma^2 / 2)) = {:.3e}", tally.checks, tally.worst),
    )
}

fn main() {
    let mut tally = LowerBoundTally::default();
    let mut failed = 0;
    let mut report = |n: usize, name: &str, run: &mut dyn FnMut() -> Verdict| {
        let start = Instant::now();
        let v = run();
        let status = if v.passed { "PASS" } else { "FAIL" };
        if !v.passed {
            failed += 1;
        }
        println!("criterion {n:>2} {status} {name}: {} [{:.2} s]", v.detail, start.elapsed().as_secs_f64());
    };
    report(1, "bound values", &mut bound_values);
    report(2, "relation property suite", &mut || property_suite(&mut tally));
    report(3, "Gaussian curve", &mut || figure_one_gaussian(&mut tally));
    report(4, "Heisenberg limit", &mut heisenberg_limit);
    report(5, "comb saturation", &mut comb_saturation);
    report(6, "representation identity", &mut representation_identity);
    report(7, "qubit protocol", &mut qubit_protocol);
    report(8, "mask relation", &mut mask_relation);
    report(9, "finite-dimensional Weyl pairs", &mut finite_dimension);
    report(10, "volume fluctuation chain", &mut lqc_chain);
    report(11, "variance lower bound", &mut || lower_bound(&tally));
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
    println!("all 11 criteria passed");
}

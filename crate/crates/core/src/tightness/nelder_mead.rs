//! Box-constrained Nelder–Mead minimization.
//!
//! Points are clamped into the box before every evaluation, which keeps the
//! simplex feasible without penalty terms.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Options {
    pub max_evaluations: usize,
    /// Stop once the simplex's function values span less than this.
    pub f_tol: f64,
    /// Stop once every vertex lies within this distance of the best one.
    pub x_tol: f64,
}

impl Default for Options {
    fn default() -> Self {
        Self { max_evaluations: 400, f_tol: 1e-13, x_tol: 1e-10 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub x: Vec<f64>,
    pub f: f64,
    pub evaluations: usize,
    pub converged: bool,
}

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

fn clamp(x: &mut [f64], lo: &[f64], hi: &[f64]) {
    for ((v, l), h) in x.iter_mut().zip(lo).zip(hi) {
        *v = v.clamp(*l, *h);
    }
}

/// Minimizes `f` over the box [lo, hi] starting from `start` with an initial
/// simplex of edge `step` along each axis (reflected inward at the walls).
pub fn minimize<F: FnMut(&[f64]) -> f64>(mut f: F, start: &[f64], step: &[f64], lo: &[f64], hi: &[f64], options: Options) -> Outcome {
    let n = start.len();
    let mut evaluations = 0;
    let mut eval = |x: &[f64], evaluations: &mut usize| {
        *evaluations += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let mut first = start.to_vec();
    clamp(&mut first, lo, hi);
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let f0 = eval(&first, &mut evaluations);
    simplex.push((first.clone(), f0));
    for i in 0..n {
        let mut v = first.clone();
        v[i] += step[i];
        if v[i] > hi[i] {
            v[i] = first[i] - step[i];
        }
        clamp(&mut v, lo, hi);
        let fv = eval(&v, &mut evaluations);
        simplex.push((v, fv));
    }

    let mut converged = false;
    while evaluations < options.max_evaluations {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let spread = simplex[n].1 - simplex[0].1;
        let size = simplex[1..]
            .iter()
            .map(|(v, _)| v.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        if spread <= options.f_tol || size <= options.x_tol {
            converged = true;
            break;
        }

        let centroid: Vec<f64> = (0..n).map(|i| simplex[..n].iter().map(|(v, _)| v[i]).sum::<f64>() / n as f64).collect();
        let along = |t: f64| -> Vec<f64> {
            let mut p: Vec<f64> = centroid.iter().zip(&simplex[n].0).map(|(c, w)| c + t * (c - w)).collect();
            clamp(&mut p, lo, hi);
            p
        };

        let reflected = along(REFLECT);
        let fr = eval(&reflected, &mut evaluations);
        if fr < simplex[0].1 {
            let expanded = along(EXPAND);
            let fe = eval(&expanded, &mut evaluations);
            simplex[n] = if fe < fr { (expanded, fe) } else { (reflected, fr) };
            continue;
        }
        if fr < simplex[n - 1].1 {
            simplex[n] = (reflected, fr);
            continue;
        }
        let (contracted, fc) = if fr < simplex[n].1 {
            let c = along(CONTRACT);
            let fc = eval(&c, &mut evaluations);
            (c, fc)
        } else {
            let c = along(-CONTRACT);
            let fc = eval(&c, &mut evaluations);
            (c, fc)
        };
        if fc < simplex[n].1.min(fr) {
            simplex[n] = (contracted, fc);
            continue;
        }
        let best = simplex[0].0.clone();
        for vertex in simplex.iter_mut().skip(1) {
            let mut v: Vec<f64> = best.iter().zip(&vertex.0).map(|(b, x)| b + SHRINK * (x - b)).collect();
            clamp(&mut v, lo, hi);
            let fv = eval(&v, &mut evaluations);
            *vertex = (v, fv);
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, f) = simplex.swap_remove(0);
    Outcome { x, f, evaluations, converged }
}

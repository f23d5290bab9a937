//! Derivative-free minimizers for the small smooth objectives used by the
//! correlation measures: Nelder–Mead with deterministic plus seeded random
//! restarts, and golden-section search on an interval.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMeadOptions {
    /// Stop when the spread of simplex values drops below this.
    pub f_tol: f64,
    /// ...and the simplex diameter below this.
    pub x_tol: f64,
    pub max_evals: usize,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self { f_tol: 1e-10, x_tol: 1e-7, max_evals: 4000 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evals: usize,
    pub converged: bool,
}

/// Nelder–Mead with standard coefficients (1, 2, 1/2, 1/2).
pub fn nelder_mead<F>(f: &mut F, x0: &[f64], step: &[f64], opts: &NelderMeadOptions) -> Minimum
where
    F: FnMut(&[f64]) -> f64,
{
    let n = x0.len();
    assert_eq!(step.len(), n, "step must match the dimension");
    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((x0.to_vec(), eval(x0, &mut evals)));
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += step[i];
        let v = eval(&x, &mut evals);
        simplex.push((x, v));
    }

    let mut converged = false;
    while evals < opts.max_evals {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = simplex[0].1;
        let worst = simplex[n].1;
        let spread = if worst.is_finite() { worst - best } else { f64::INFINITY };
        let diameter = simplex[1..].iter().map(|(x, _)| dist_inf(x, &simplex[0].0)).fold(0.0, f64::max);
        if spread <= opts.f_tol && diameter <= opts.x_tol {
            converged = true;
            break;
        }

        let mut centroid = vec![0.0; n];
        for (x, _) in &simplex[..n] {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi / n as f64;
            }
        }
        let along = |t: f64| -> Vec<f64> { centroid.iter().zip(&simplex[n].0).map(|(c, w)| c + t * (w - c)).collect() };

        let xr = along(-1.0);
        let fr = eval(&xr, &mut evals);
        if fr < simplex[0].1 {
            let xe = along(-2.0);
            let fe = eval(&xe, &mut evals);
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
            continue;
        }
        let (xc, fc) = if fr < simplex[n].1 {
            let xc = along(-0.5);
            let fc = eval(&xc, &mut evals);
            (xc, fc)
        } else {
            let xc = along(0.5);
            let fc = eval(&xc, &mut evals);
            (xc, fc)
        };
        if fc < simplex[n].1.min(fr) {
            simplex[n] = (xc, fc);
            continue;
        }
        let x_best = simplex[0].0.clone();
        for (x, v) in simplex.iter_mut().skip(1) {
            for (xi, bi) in x.iter_mut().zip(&x_best) {
                *xi = bi + 0.5 * (*xi - bi);
            }
            *v = eval(x, &mut evals);
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, value) = simplex.swap_remove(0);
    Minimum { x, value, evals, converged }
}

fn dist_inf(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Restart plan for [`multistart`]: every point of the tensor grid, then
/// `random_starts` uniform draws from the box.
#[derive(Debug, Clone, PartialEq)]
pub struct MultistartPlan {
    pub bounds: Vec<(f64, f64)>,
    pub grid: Vec<Vec<f64>>,
    pub random_starts: usize,
    pub seed: u64,
    /// Initial simplex edge as a fraction of each box width.
    pub step_fraction: f64,
    pub options: NelderMeadOptions,
}

impl MultistartPlan {
    pub fn starts(&self) -> Vec<Vec<f64>> {
        let mut starts: Vec<Vec<f64>> = vec![Vec::new()];
        for axis in &self.grid {
            starts = starts
                .into_iter()
                .flat_map(|prefix| {
                    axis.iter().map(move |&v| {
                        let mut p = prefix.clone();
                        p.push(v);
                        p
                    })
                })
                .collect();
        }
        if self.grid.is_empty() {
            starts.clear();
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        for _ in 0..self.random_starts {
            starts.push(self.bounds.iter().map(|&(lo, hi)| rng.random_range(lo..hi)).collect());
        }
        starts
    }
}

/// Best local minimum over all restarts. The objective is responsible for
/// mapping points outside the box back into it (clamping or wrapping).
pub fn multistart<F>(f: &mut F, plan: &MultistartPlan) -> Minimum
where
    F: FnMut(&[f64]) -> f64,
{
    let step: Vec<f64> = plan.bounds.iter().map(|&(lo, hi)| plan.step_fraction * (hi - lo)).collect();
    let mut best: Option<Minimum> = None;
    let mut evals = 0;
    for start in plan.starts() {
        let m = nelder_mead(f, &start, &step, &plan.options);
        evals += m.evals;
        if best.as_ref().is_none_or(|b| m.value < b.value) {
            best = Some(m);
        }
    }
    let mut best = best.expect("multistart plan has no starting points");
    best.evals = evals;
    best
}

/// Result of a bracketed one-dimensional search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineMinimum {
    pub x: f64,
    pub value: f64,
    /// The minimizer sits on an end of the interval (no interior bracket).
    pub at_boundary: bool,
}

/// Golden-section search on `[a, b]` to absolute tolerance `tol`.
pub fn golden_section<F>(mut f: F, a: f64, b: f64, tol: f64) -> LineMinimum
where
    F: FnMut(f64) -> f64,
{
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (a.min(b), a.max(b));
    let mut c = hi - inv_phi * (hi - lo);
    let mut d = lo + inv_phi * (hi - lo);
    let (mut fc, mut fd) = (f(c), f(d));
    while hi - lo > tol {
        if fc <= fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = f(d);
        }
    }
    let x = 0.5 * (lo + hi);
    let fx = f(x);
    let (fa, fb) = (f(a.min(b)), f(a.max(b)));
    if fa < fx && fa <= fb {
        LineMinimum { x: a.min(b), value: fa, at_boundary: true }
    } else if fb < fx {
        LineMinimum { x: a.max(b), value: fb, at_boundary: true }
    } else {
        let span = (a - b).abs();
        let near_edge = (x - a.min(b)) < 10.0 * tol || (a.max(b) - x) < 10.0 * tol;
        LineMinimum { x, value: fx, at_boundary: near_edge && span > 10.0 * tol }
    }
}

//! Bounded Nelder–Mead simplex search with restarts and multi-start.

use crate::error::{Error, Result};
use crate::rng::{SeedSpec, Substream};

/// Box constraints `lower ≤ x ≤ upper`.
#[derive(Clone, Debug, PartialEq)]
pub struct Bounds {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Bounds {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::invalid("bounds", "lower and upper differ in length"));
        }
        if lower.iter().zip(&upper).any(|(l, u)| !(l < u) || !l.is_finite() || !u.is_finite()) {
            return Err(Error::invalid("bounds", "need finite lower < upper in every coordinate"));
        }
        Ok(Bounds { lower, upper })
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim() && x.iter().enumerate().all(|(i, &v)| v >= self.lower[i] && v <= self.upper[i])
    }

    /// Mirrors coordinates that leave the box back inside it.
    pub fn reflect(&self, x: &mut [f64]) {
        for (i, v) in x.iter_mut().enumerate() {
            let (l, u) = (self.lower[i], self.upper[i]);
            let w = u - l;
            if *v < l || *v > u {
                // fold onto [l, u] with period 2w
                let mut t = (*v - l).rem_euclid(2.0 * w);
                if t > w {
                    t = 2.0 * w - t;
                }
                *v = l + t;
            }
            *v = v.clamp(l, u);
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OptimizerConfig {
    pub max_evals: usize,
    /// Stop when the simplex's objective spread falls below this.
    pub f_tol: f64,
    /// Relative simplex size below which it is considered collapsed.
    pub x_tol: f64,
    pub n_starts: usize,
    /// Restarts of the simplex around the best point after convergence.
    pub restarts: usize,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            max_evals: 4000,
            f_tol: 1e-10,
            x_tol: 1e-9,
            n_starts: 5,
            restarts: 3,
            seed: 0,
        }
    }
}

/// Best value after a simplex iteration.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceRow {
    pub start: usize,
    pub iteration: usize,
    pub evaluations: usize,
    pub value: f64,
    pub x: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OptimResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    pub converged: bool,
    pub trace: Vec<TraceRow>,
}

/// Minimises `f` over `bounds`. Start 0 is `x0`; further starts are drawn
/// uniformly in the box between `x0` and a random point, seeded from
/// `cfg.seed`. Non-finite objective values count as `+∞`.
pub fn minimize<F>(f: F, x0: &[f64], bounds: &Bounds, cfg: &OptimizerConfig) -> Result<OptimResult>
where
    F: Fn(&[f64]) -> f64,
{
    if !bounds.contains(x0) {
        return Err(Error::invalid("initial", "starting point outside the bounds"));
    }
    if cfg.n_starts == 0 || cfg.max_evals == 0 {
        return Err(Error::invalid("optimizer", "need at least one start and one evaluation"));
    }
    let mut g = SeedSpec::new(cfg.seed, 0, Substream::SeriesTau).variates();
    let mut best: Option<OptimResult> = None;
    let mut trace = Vec::new();
    let mut total = 0;
    for start in 0..cfg.n_starts {
        let x_start: Vec<f64> = if start == 0 {
            x0.to_vec()
        } else {
            (0..x0.len())
                .map(|i| {
                    let target = bounds.lower[i] + g.uniform() * (bounds.upper[i] - bounds.lower[i]);
                    // stay in the neighbourhood of x0 on average
                    x0[i] + 0.5 * g.uniform() * (target - x0[i])
                })
                .collect()
        };
        let run = run_start(&f, &x_start, bounds, cfg, start, &mut trace);
        total += run.evaluations;
        if best.as_ref().map_or(true, |b| run.value < b.value) {
            best = Some(run);
        }
    }
    let mut best = best.expect("at least one start");
    best.evaluations = total;
    best.trace = trace;
    if !best.value.is_finite() {
        return Err(Error::Numerical("objective not finite at any visited point".into()));
    }
    Ok(best)
}

fn run_start<F>(f: &F, x0: &[f64], bounds: &Bounds, cfg: &OptimizerConfig, start: usize, trace: &mut Vec<TraceRow>) -> OptimResult
where
    F: Fn(&[f64]) -> f64,
{
    let eval = |x: &[f64]| {
        let v = f(x);
        if v.is_finite() {
            v
        } else {
            f64::INFINITY
        }
    };
    let mut evals = 0;
    let mut iteration = 0;
    let mut best_x = x0.to_vec();
    let mut best_v = eval(x0);
    evals += 1;
    let mut converged = false;
    for _ in 0..=cfg.restarts {
        let budget = cfg.max_evals.saturating_sub(evals);
        if budget == 0 {
            break;
        }
        let before = best_v;
        let (x, v, used, ok) = simplex(&eval, &best_x, best_v, bounds, cfg, budget, |v, x, used| {
            iteration += 1;
            trace.push(TraceRow {
                start,
                iteration,
                evaluations: evals + used,
                value: v,
                x: x.to_vec(),
            });
        });
        evals += used;
        if v <= best_v {
            best_v = v;
            best_x = x;
        }
        converged = ok;
        if !(before - best_v > cfg.f_tol) {
            break;
        }
    }
    OptimResult {
        x: best_x,
        value: best_v,
        evaluations: evals,
        converged,
        trace: Vec::new(),
    }
}

#[allow(clippy::type_complexity)]
fn simplex<E, T>(
    eval: &E,
    x0: &[f64],
    f0: f64,
    bounds: &Bounds,
    cfg: &OptimizerConfig,
    budget: usize,
    mut on_iter: T,
) -> (Vec<f64>, f64, usize, bool)
where
    E: Fn(&[f64]) -> f64,
    T: FnMut(f64, &[f64], usize),
{
    let n = x0.len();
    let mut used = 0;
    let mut pts: Vec<(Vec<f64>, f64)> = vec![(x0.to_vec(), f0)];
    for i in 0..n {
        let mut x = x0.to_vec();
        let width = bounds.upper[i] - bounds.lower[i];
        let step = if x[i] != 0.0 { 0.1 * x[i].abs() } else { 0.01 * width };
        x[i] += step.min(0.25 * width);
        bounds.reflect(&mut x);
        let v = eval(&x);
        used += 1;
        pts.push((x, v));
    }
    let mut converged = false;
    // dimension-adaptive coefficients; the classic (1, 2, ½, ½) stalls beyond a few parameters
    let nf = n as f64;
    let (alpha, gamma, rho, sigma) = (1.0, 1.0 + 2.0 / nf, 0.75 - 0.5 / nf, 1.0 - 1.0 / nf);
    while used < budget {
        pts.sort_by(|a, b| a.1.total_cmp(&b.1));
        on_iter(pts[0].1, &pts[0].0, used);
        let spread = pts[n].1 - pts[0].1;
        let size = (1..=n)
            .map(|k| {
                (0..n)
                    .map(|i| (pts[k].0[i] - pts[0].0[i]).abs() / (bounds.upper[i] - bounds.lower[i]))
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if (pts[0].1.is_finite() && spread.abs() <= cfg.f_tol) || size <= cfg.x_tol {
            converged = true;
            break;
        }
        let centroid: Vec<f64> = (0..n).map(|i| pts[..n].iter().map(|p| p.0[i]).sum::<f64>() / n as f64).collect();
        let toward = |coef: f64| {
            let mut x: Vec<f64> = (0..n).map(|i| centroid[i] + coef * (pts[n].0[i] - centroid[i])).collect();
            bounds.reflect(&mut x);
            x
        };
        let xr = toward(-alpha);
        let fr = eval(&xr);
        used += 1;
        if fr < pts[0].1 {
            let xe = toward(-gamma);
            let fe = eval(&xe);
            used += 1;
            pts[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < pts[n - 1].1 {
            pts[n] = (xr, fr);
            continue;
        }
        let (xc, fc) = if fr < pts[n].1 {
            let x = toward(-rho);
            let v = eval(&x);
            (x, v)
        } else {
            let x = toward(rho);
            let v = eval(&x);
            (x, v)
        };
        used += 1;
        if fc < pts[n].1.min(fr) {
            pts[n] = (xc, fc);
            continue;
        }
        let best = pts[0].0.clone();
        for p in pts.iter_mut().skip(1) {
            let mut x: Vec<f64> = (0..n).map(|i| best[i] + sigma * (p.0[i] - best[i])).collect();
            bounds.reflect(&mut x);
            p.1 = eval(&x);
            p.0 = x;
            used += 1;
        }
    }
    pts.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, v) = pts.swap_remove(0);
    (x, v, used, converged)
}

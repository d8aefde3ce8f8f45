//! Limited-memory BFGS with a strong-Wolfe line search.

use std::collections::VecDeque;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct OptimizerSettings {
    /// Stop when the gradient infinity norm falls below this.
    pub grad_tol: f64,
    /// Evaluation budget per parameter; the total budget is this times the
    /// number of parameters (at least one parameter's worth).
    pub evals_per_param: usize,
    /// Number of stored curvature pairs.
    pub memory: usize,
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        OptimizerSettings {
            grad_tol: 1e-8,
            evals_per_param: 200,
            memory: 10,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OptimizeResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub grad_inf_norm: f64,
    pub evaluations: usize,
    pub converged: bool,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn inf_norm(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.abs()))
}

struct Objective<F> {
    f: F,
    evals: usize,
    best: (f64, Vec<f64>, Vec<f64>),
}

impl<F> Objective<F>
where
    F: FnMut(&[f64]) -> Result<(f64, Vec<f64>)>,
{
    fn eval(&mut self, x: &[f64]) -> Result<(f64, Vec<f64>)> {
        self.evals += 1;
        let (v, g) = (self.f)(x)?;
        if v.is_nan() || g.iter().any(|c| c.is_nan()) {
            return Err(Error::NotANumber);
        }
        if v < self.best.0 {
            self.best = (v, x.to_vec(), g.clone());
        }
        Ok((v, g))
    }
}

/// Minimises `f`, which returns the value and gradient at a point.
pub fn minimize<F>(f: F, x0: &[f64], settings: &OptimizerSettings) -> Result<OptimizeResult>
where
    F: FnMut(&[f64]) -> Result<(f64, Vec<f64>)>,
{
    let budget = settings.evals_per_param * x0.len().max(1);
    let mut obj = Objective {
        f,
        evals: 0,
        best: (f64::INFINITY, x0.to_vec(), vec![0.0; x0.len()]),
    };
    let mut x = x0.to_vec();
    let (mut fx, mut g) = obj.eval(&x)?;
    let mut history: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::new();

    while inf_norm(&g) >= settings.grad_tol && obj.evals < budget && !x.is_empty() {
        let mut d = two_loop(&g, &history);
        let mut slope = dot(&d, &g);
        if slope >= 0.0 {
            // curvature information went stale; restart from steepest descent
            history.clear();
            d = g.iter().map(|c| -c).collect();
            slope = -dot(&g, &g);
        }
        let alpha0 = if history.is_empty() {
            (1.0 / inf_norm(&d)).min(1.0)
        } else {
            1.0
        };
        let Some((alpha, fnew, gnew)) = line_search(&mut obj, &x, fx, slope, &d, alpha0, budget)?
        else {
            break;
        };
        let s: Vec<f64> = d.iter().map(|di| alpha * di).collect();
        let xnew: Vec<f64> = x.iter().zip(&s).map(|(a, b)| a + b).collect();
        let y: Vec<f64> = gnew.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-12 * dot(&y, &y).sqrt() * dot(&s, &s).sqrt() {
            if history.len() == settings.memory.max(1) {
                history.pop_front();
            }
            history.push_back((s, y, 1.0 / sy));
        }
        x = xnew;
        fx = fnew;
        g = gnew;
    }

    let (value, xb, gb) = if inf_norm(&g) >= settings.grad_tol && obj.best.0 < fx {
        obj.best.clone()
    } else {
        (fx, x, g)
    };
    let grad_inf_norm = inf_norm(&gb);
    Ok(OptimizeResult {
        converged: grad_inf_norm < settings.grad_tol,
        x: xb,
        value,
        grad_inf_norm,
        evaluations: obj.evals,
    })
}

fn two_loop(g: &[f64], history: &VecDeque<(Vec<f64>, Vec<f64>, f64)>) -> Vec<f64> {
    let mut q = g.to_vec();
    let mut alphas = Vec::with_capacity(history.len());
    for (s, y, rho) in history.iter().rev() {
        let a = rho * dot(s, &q);
        q.iter_mut().zip(y).for_each(|(qi, yi)| *qi -= a * yi);
        alphas.push(a);
    }
    if let Some((s, y, _)) = history.back() {
        let gamma = dot(s, y) / dot(y, y);
        q.iter_mut().for_each(|qi| *qi *= gamma);
    }
    for ((s, y, rho), a) in history.iter().zip(alphas.iter().rev()) {
        let b = rho * dot(y, &q);
        q.iter_mut().zip(s).for_each(|(qi, si)| *qi += (a - b) * si);
    }
    q.iter_mut().for_each(|qi| *qi = -*qi);
    q
}

const C1: f64 = 1e-4;
const C2: f64 = 0.9;

/// Approximate Wolfe conditions, usable once value differences reach
/// rounding level and the Armijo test can no longer discriminate.
fn approx_wolfe(f0: f64, slope0: f64, fa: f64, da: f64) -> bool {
    fa <= f0 + 1e-14 * f0.abs().max(1.0) && (2.0 * C1 - 1.0) * slope0 >= da && da >= C2 * slope0
}

type Probe = (f64, f64, Vec<f64>);

/// Strong-Wolfe step along `d`; `None` when no acceptable step was found.
fn line_search<F>(
    obj: &mut Objective<F>,
    x: &[f64],
    f0: f64,
    slope0: f64,
    d: &[f64],
    alpha0: f64,
    budget: usize,
) -> Result<Option<Probe>>
where
    F: FnMut(&[f64]) -> Result<(f64, Vec<f64>)>,
{
    let mut probe = |obj: &mut Objective<F>, alpha: f64| -> Result<(f64, f64, Vec<f64>)> {
        let xa: Vec<f64> = x.iter().zip(d).map(|(a, b)| a + alpha * b).collect();
        let (fa, ga) = obj.eval(&xa)?;
        Ok((fa, dot(&ga, d), ga))
    };
    let mut prev: (f64, f64, f64) = (0.0, f0, slope0);
    let mut alpha = alpha0;
    for i in 0..30 {
        if obj.evals >= budget {
            return Ok(None);
        }
        let (fa, da, ga) = probe(obj, alpha)?;
        if approx_wolfe(f0, slope0, fa, da) {
            return Ok(Some((alpha, fa, ga)));
        }
        if fa > f0 + C1 * alpha * slope0 || (i > 0 && fa >= prev.1) {
            return zoom(obj, &mut probe, f0, slope0, prev, (alpha, fa, da), budget);
        }
        if da.abs() <= -C2 * slope0 {
            return Ok(Some((alpha, fa, ga)));
        }
        if da >= 0.0 {
            return zoom(obj, &mut probe, f0, slope0, (alpha, fa, da), prev, budget);
        }
        prev = (alpha, fa, da);
        alpha *= 2.0;
    }
    Ok(None)
}

fn zoom<F, P>(
    obj: &mut Objective<F>,
    probe: &mut P,
    f0: f64,
    slope0: f64,
    mut lo: (f64, f64, f64),
    mut hi: (f64, f64, f64),
    budget: usize,
) -> Result<Option<Probe>>
where
    F: FnMut(&[f64]) -> Result<(f64, Vec<f64>)>,
    P: FnMut(&mut Objective<F>, f64) -> Result<Probe>,
{
    let mut best: Option<Probe> = None;
    for _ in 0..40 {
        if obj.evals >= budget {
            break;
        }
        let alpha = interpolate(lo, hi);
        let (fa, da, ga) = probe(obj, alpha)?;
        if approx_wolfe(f0, slope0, fa, da) {
            return Ok(Some((alpha, fa, ga)));
        }
        if fa > f0 + C1 * alpha * slope0 || fa >= lo.1 {
            hi = (alpha, fa, da);
        } else {
            if da.abs() <= -C2 * slope0 {
                return Ok(Some((alpha, fa, ga)));
            }
            if best.as_ref().is_none_or(|b| fa < b.1) {
                best = Some((alpha, fa, ga.clone()));
            }
            if da * (hi.0 - lo.0) >= 0.0 {
                hi = lo;
            }
            lo = (alpha, fa, da);
        }
        if (hi.0 - lo.0).abs() < 1e-14 * lo.0.abs().max(1e-10) {
            break;
        }
    }
    // a sufficient-decrease point is still progress even without curvature
    Ok(best.filter(|b| b.1 < f0))
}

/// Minimiser of the cubic through two points with slopes, kept inside the
/// bracket; bisection when the cubic is degenerate.
fn interpolate(a: (f64, f64, f64), b: (f64, f64, f64)) -> f64 {
    let (x0, f0, d0) = a;
    let (x1, f1, d1) = b;
    let (lo, hi) = if x0 < x1 { (x0, x1) } else { (x1, x0) };
    let mid = 0.5 * (lo + hi);
    let h = x1 - x0;
    if h.abs() < f64::EPSILON {
        return mid;
    }
    let t1 = d0 + d1 - 3.0 * (f0 - f1) / (x0 - x1);
    let disc = t1 * t1 - d0 * d1;
    if disc < 0.0 {
        return mid;
    }
    let t2 = disc.sqrt().copysign(h);
    let x = x1 - h * (d1 + t2 - t1) / (d1 - d0 + 2.0 * t2);
    let margin = 0.1 * (hi - lo);
    if !x.is_finite() || x < lo + margin || x > hi - margin {
        mid
    } else {
        x
    }
}

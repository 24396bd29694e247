//! Projected-gradient ascent with Armijo backtracking along the projection arc.
//!
//! Trial steps come from the Barzilai-Borwein rule, safeguarded to
//! `[MIN_STEP, MAX_STEP]`. Every accepted step satisfies the Armijo condition,
//! so the objective never decreases across inner iterations.

use crate::error::{FpError, Result};

const MIN_STEP: f64 = 1e-20;
const MAX_STEP: f64 = 1e20;

/// Options of the projected-gradient inner solver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub max_inner_iters: usize,
    pub grad_tol: f64,
    pub armijo_c: f64,
    pub backtrack_factor: f64,
    pub initial_step: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            max_inner_iters: 500,
            grad_tol: 1e-10,
            armijo_c: 1e-4,
            backtrack_factor: 0.5,
            initial_step: 1.0,
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        let bad = |f: &str, d: &str| Err(FpError::config(format!("solver.{f}"), d.to_string()));
        if self.max_inner_iters == 0 {
            return bad("max_inner_iters", "must be positive");
        }
        if !(self.grad_tol > 0.0) {
            return bad("grad_tol", "must be positive");
        }
        if !(self.armijo_c > 0.0 && self.armijo_c < 1.0) {
            return bad("armijo_c", "must lie in (0, 1)");
        }
        if !(self.backtrack_factor > 0.0 && self.backtrack_factor < 1.0) {
            return bad("backtrack_factor", "must lie in (0, 1)");
        }
        if !(self.initial_step > 0.0) {
            return bad("initial_step", "must be positive");
        }
        Ok(())
    }
}

/// A differentiable objective to be maximized.
///
/// `value` may return a non-finite number outside the objective's domain; the
/// line search treats such points as rejected steps.
pub trait SmoothObjective {
    fn value(&self, x: &[f64]) -> f64;
    fn gradient(&self, x: &[f64], grad: &mut [f64]);
}

/// Objective assembled from a pair of closures.
pub struct FnObjective<F, G> {
    pub value: F,
    pub gradient: G,
}

impl<F, G> SmoothObjective for FnObjective<F, G>
where
    F: Fn(&[f64]) -> f64,
    G: Fn(&[f64], &mut [f64]),
{
    fn value(&self, x: &[f64]) -> f64 {
        (self.value)(x)
    }
    fn gradient(&self, x: &[f64], grad: &mut [f64]) {
        (self.gradient)(x, grad)
    }
}

/// Result of an inner maximization.
#[derive(Debug, Clone, PartialEq)]
pub struct InnerOutcome {
    pub x: Vec<f64>,
    pub value: f64,
    /// Projected-gradient residual `||x - P(x + g)||` at unit step.
    pub residual: f64,
    pub iterations: usize,
    /// False when the iteration budget ran out or the line search stalled.
    pub converged: bool,
}

/// `||x - P(x + g)||`, the stationarity measure of a box/ball constrained maximization.
pub fn projected_residual(x: &[f64], g: &[f64], project: &dyn Fn(&mut [f64])) -> f64 {
    let mut z: Vec<f64> = x.iter().zip(g).map(|(a, b)| a + b).collect();
    project(&mut z);
    z.iter()
        .zip(x)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Maximizes a concave `objective` over the convex set behind `project`.
///
/// The projection must be idempotent. Fails only if the projected start point
/// lies outside the objective's domain; a stalled line search returns the best
/// iterate with `converged = false`.
pub fn projected_gradient_maximize(
    objective: &dyn SmoothObjective,
    project: &dyn Fn(&mut [f64]),
    x0: &[f64],
    opts: &SolverOptions,
) -> Result<InnerOutcome> {
    let n = x0.len();
    let mut x = x0.to_vec();
    project(&mut x);
    let mut f = objective.value(&x);
    if !f.is_finite() {
        return Err(FpError::domain(
            "projected gradient start",
            format!("objective is {f} at the starting point"),
        ));
    }
    let mut g = vec![0.0; n];
    objective.gradient(&x, &mut g);
    let mut step = opts.initial_step;
    let mut xn = vec![0.0; n];
    let mut gn = vec![0.0; n];
    let mut stalls = 0;

    for it in 0..opts.max_inner_iters {
        let residual = projected_residual(&x, &g, project);
        if residual <= opts.grad_tol {
            return Ok(InnerOutcome {
                x,
                value: f,
                residual,
                iterations: it,
                converged: true,
            });
        }

        let mut s = step;
        let accepted = loop {
            for i in 0..n {
                xn[i] = x[i] + s * g[i];
            }
            project(&mut xn);
            let d: Vec<f64> = xn.iter().zip(&x).map(|(a, b)| a - b).collect();
            let gd = dot(&g, &d);
            if gd <= 0.0 {
                // No ascent left along the arc at this resolution.
                break None;
            }
            let fnew = objective.value(&xn);
            if fnew.is_finite() && fnew >= f + opts.armijo_c * gd {
                break Some((fnew, d));
            }
            s *= opts.backtrack_factor;
            if s < MIN_STEP {
                break None;
            }
        };

        let Some((fnew, d)) = accepted else {
            return Ok(InnerOutcome {
                x,
                value: f,
                residual,
                iterations: it,
                converged: false,
            });
        };

        objective.gradient(&xn, &mut gn);
        // Barzilai-Borwein step for the next trial; curvature is negative for concave f.
        let yk: Vec<f64> = gn.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&d, &yk);
        let ss = dot(&d, &d);
        step = if sy < 0.0 {
            (ss / -sy).clamp(MIN_STEP, MAX_STEP)
        } else {
            (s * 4.0).min(MAX_STEP)
        };

        let gain = fnew - f;
        std::mem::swap(&mut x, &mut xn);
        std::mem::swap(&mut g, &mut gn);
        f = fnew;

        if gain <= f64::EPSILON * f.abs().max(1e-300) {
            stalls += 1;
            if stalls >= 5 {
                let residual = projected_residual(&x, &g, project);
                return Ok(InnerOutcome {
                    x,
                    value: f,
                    residual,
                    iterations: it + 1,
                    converged: residual <= opts.grad_tol,
                });
            }
        } else {
            stalls = 0;
        }
    }

    let residual = projected_residual(&x, &g, project);
    Ok(InnerOutcome {
        x,
        value: f,
        residual,
        iterations: opts.max_inner_iters,
        converged: residual <= opts.grad_tol,
    })
}

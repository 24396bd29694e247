//! Inner solver for the max-min epigraph form: maximize `min_m g_m(x)` where
//! each `g_m` is a concave transformed ratio term.
//!
//! The pointwise minimum is replaced by the soft-min
//! `-mu ln sum_m exp(-g_m / mu)`, which is concave, smooth, and within
//! `mu ln M` of the true minimum. Its gradient is a softmax-weighted average
//! of the term gradients, so near-active terms share the ascent direction.
//! `mu` is driven down geometrically with warm starts.

use crate::error::Result;
use crate::fp::problem::{AuxiliaryVector, RatioProblem};
use crate::fp::solve::InnerSolver;
use crate::numerics::pgm::{InnerOutcome, SmoothObjective};

/// Number of decades the smoothing parameter is driven down by.
const CONTINUATION_LEVELS: i32 = 12;

struct SoftMin<'a> {
    problem: &'a RatioProblem,
    aux: &'a AuxiliaryVector,
    mu: f64,
}

impl SoftMin<'_> {
    fn terms(&self, x: &[f64]) -> Vec<f64> {
        self.problem
            .terms()
            .iter()
            .zip(&self.aux.values)
            .map(|(t, y)| t.transformed(x, y))
            .collect()
    }

    fn weights(&self, g: &[f64]) -> (f64, Vec<f64>) {
        let gmin = g.iter().cloned().fold(f64::INFINITY, f64::min);
        let e: Vec<f64> = g.iter().map(|&v| (-(v - gmin) / self.mu).exp()).collect();
        let total: f64 = e.iter().sum();
        (gmin - self.mu * total.ln(), e.into_iter().map(|v| v / total).collect())
    }
}

impl SmoothObjective for SoftMin<'_> {
    fn value(&self, x: &[f64]) -> f64 {
        let g = self.terms(x);
        if g.iter().any(|v| !v.is_finite()) {
            return f64::NAN;
        }
        self.weights(&g).0
    }

    fn gradient(&self, x: &[f64], grad: &mut [f64]) {
        let g = self.terms(x);
        let (_, w) = self.weights(&g);
        grad.iter_mut().for_each(|v| *v = 0.0);
        let mut work = vec![0.0; x.len()];
        for ((t, y), &wm) in self.problem.terms().iter().zip(&self.aux.values).zip(&w) {
            if wm > 0.0 {
                t.add_transformed_gradient(x, y, wm, grad, &mut work);
            }
        }
    }
}

fn min_term(problem: &RatioProblem, aux: &AuxiliaryVector, x: &[f64]) -> f64 {
    problem
        .terms()
        .iter()
        .zip(&aux.values)
        .map(|(t, y)| t.transformed(x, y))
        .fold(f64::INFINITY, f64::min)
}

/// Maximizes `min_m g_m(x)` over the problem's feasible set for fixed `aux`.
///
/// The returned point never has a smaller minimum than `x_start`; the
/// `value` field holds that minimum and `residual` the projected-gradient
/// residual of the last smoothed solve.
pub fn maximize_min(
    problem: &RatioProblem,
    aux: &AuxiliaryVector,
    inner: &dyn InnerSolver,
    x_start: &[f64],
) -> Result<InnerOutcome> {
    let start_min = min_term(problem, aux, x_start);
    let scale = problem
        .terms()
        .iter()
        .zip(&aux.values)
        .map(|(t, y)| t.transformed(x_start, y).abs())
        .fold(0.0, f64::max)
        .max(1e-12);

    let mut x = x_start.to_vec();
    let mut residual = f64::NAN;
    let mut iterations = 0;
    let mut converged = true;
    for level in 1..=CONTINUATION_LEVELS {
        let smooth = SoftMin {
            problem,
            aux,
            mu: scale * 10f64.powi(-level),
        };
        let out = inner.maximize(&smooth, problem.feasible_set(), &x)?;
        x = out.x;
        residual = out.residual;
        iterations += out.iterations;
        converged = out.converged;
    }

    let end_min = min_term(problem, aux, &x);
    if end_min >= start_min {
        Ok(InnerOutcome {
            x,
            value: end_min,
            residual,
            iterations,
            converged,
        })
    } else {
        Ok(InnerOutcome {
            x: x_start.to_vec(),
            value: start_min,
            residual,
            iterations,
            converged: false,
        })
    }
}

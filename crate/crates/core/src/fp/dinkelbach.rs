use crate::error::{FpError, Result};
use crate::fp::problem::{RatioProblem, Term};
use crate::fp::solve::{check_start, InnerSolver};
use crate::numerics::pgm::{projected_residual, SmoothObjective};
use crate::trace::IterationTrace;

#[derive(Debug, Clone)]
pub struct DinkelbachSolution {
    pub x: Vec<f64>,
    /// Final parameter `y`, equal to the ratio at `x`.
    pub y: f64,
    /// Parameter sequence `y_1, y_2, ...`; nondecreasing.
    pub y_history: Vec<f64>,
    pub trace: IterationTrace,
    pub converged: bool,
}

struct Parametric<'a> {
    term: &'a dyn crate::fp::problem::RatioTerm,
    y: f64,
}

impl SmoothObjective for Parametric<'_> {
    fn value(&self, x: &[f64]) -> f64 {
        self.term.numerator(x) - self.y * self.term.denominator(x)
    }

    fn gradient(&self, x: &[f64], grad: &mut [f64]) {
        let mut work = vec![0.0; x.len()];
        self.term.numerator_gradient(x, grad);
        self.term.denominator_gradient(x, &mut work);
        for (g, w) in grad.iter_mut().zip(&work) {
            *g -= self.y * w;
        }
    }
}

/// Dinkelbach's method for a single scalar ratio.
///
/// Alternates `x <- argmax A(x) - y B(x)` with `y <- A(x) / B(x)` and stops
/// once `|y_{t+1} - y_t| <= tol`. The trace records the ratio at each iterate,
/// starting with `x0`.
pub fn dinkelbach_solve(
    problem: &RatioProblem,
    inner: &dyn InnerSolver,
    x0: &[f64],
    tol: f64,
    max_iters: usize,
) -> Result<DinkelbachSolution> {
    let term = match problem.terms() {
        [Term::Scalar(t)] => t.as_ref(),
        [Term::Matrix(_)] => {
            return Err(FpError::Usage("Dinkelbach's transform needs a scalar ratio".into()));
        }
        terms => {
            return Err(FpError::Usage(format!(
                "Dinkelbach's transform handles exactly one ratio, got {}",
                terms.len()
            )))
        }
    };
    let set = problem.feasible_set();
    check_start(set, x0)?;

    let residual_at = |x: &[f64]| -> Result<f64> {
        let g = problem.objective_gradient(x)?.unwrap_or_else(|| vec![0.0; x.len()]);
        Ok(projected_residual(x, &g, &|z: &mut [f64]| set.project(z)))
    };

    let mut x = x0.to_vec();
    let mut y = problem.terms()[0].ratio(0, &x)?;
    let mut trace = IterationTrace::new();
    trace.push(y, residual_at(&x)?);
    let mut y_history = vec![y];
    let mut converged = false;

    for _ in 0..max_iters {
        let out = inner.maximize(&Parametric { term, y }, set, &x)?;
        x = out.x;
        let y_new = problem.terms()[0].ratio(0, &x)?;
        trace.push(y_new, residual_at(&x)?);
        y_history.push(y_new);
        let step = (y_new - y).abs();
        y = y_new;
        if step <= tol {
            converged = true;
            break;
        }
    }

    Ok(DinkelbachSolution {
        x,
        y,
        y_history,
        trace,
        converged,
    })
}

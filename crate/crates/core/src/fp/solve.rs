//! Alternating quadratic-transform solver for sum, sum-of-functions and
//! max-min ratio problems.

use crate::error::{FpError, Result};
use crate::fp::maxmin::maximize_min;
use crate::fp::problem::{AuxiliaryVector, Combiner, FeasibleSet, RatioProblem};
use crate::numerics::pgm::{projected_gradient_maximize, projected_residual, InnerOutcome, SmoothObjective, SolverOptions};
use crate::trace::{objective_settled, IterationTrace};

/// Tolerance of the feasibility check on starting points.
pub const FEASIBILITY_TOL: f64 = 1e-9;

/// Solves the concave inner maximization for fixed auxiliary variables.
pub trait InnerSolver: Sync {
    fn maximize(&self, objective: &dyn SmoothObjective, set: &FeasibleSet, x0: &[f64]) -> Result<InnerOutcome>;
}

/// Projected gradient with Armijo backtracking.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ProjectedGradient(pub SolverOptions);

impl InnerSolver for ProjectedGradient {
    fn maximize(&self, objective: &dyn SmoothObjective, set: &FeasibleSet, x0: &[f64]) -> Result<InnerOutcome> {
        let project = |x: &mut [f64]| set.project(x);
        projected_gradient_maximize(objective, &project, x0, &self.0)
    }
}

#[derive(Debug, Clone)]
pub struct FpSolution {
    pub x: Vec<f64>,
    pub aux: AuxiliaryVector,
    pub trace: IterationTrace,
    pub converged: bool,
}

pub(crate) fn check_start(set: &FeasibleSet, x0: &[f64]) -> Result<()> {
    if x0.len() != set.dimension() {
        return Err(FpError::Dimension {
            context: "starting point",
            expected: set.dimension(),
            got: x0.len(),
        });
    }
    if !set.contains(x0, FEASIBILITY_TOL) {
        return Err(FpError::Infeasible(format!("{x0:?} is outside the feasible set")));
    }
    Ok(())
}

/// Transformed objective `sum_m f_m(2 y_m sqrt(A_m) - y_m^2 B_m)` for fixed `y`.
pub struct TransformedSum<'a> {
    problem: &'a RatioProblem,
    aux: &'a AuxiliaryVector,
}

impl<'a> TransformedSum<'a> {
    /// Panics on the max-min combiner, which has no smooth transformed sum.
    pub fn new(problem: &'a RatioProblem, aux: &'a AuxiliaryVector) -> Self {
        assert!(!matches!(problem.combiner(), Combiner::MaxMin), "max-min has no transformed sum");
        Self { problem, aux }
    }
}

impl SmoothObjective for TransformedSum<'_> {
    fn value(&self, x: &[f64]) -> f64 {
        let terms = self.problem.terms().iter().zip(&self.aux.values);
        match self.problem.combiner() {
            Combiner::SumOfFunctions(fs) => terms
                .zip(fs)
                .map(|((t, y), f)| (f.value)(t.transformed(x, y)))
                .sum(),
            _ => terms.map(|(t, y)| t.transformed(x, y)).sum(),
        }
    }

    fn gradient(&self, x: &[f64], grad: &mut [f64]) {
        grad.iter_mut().for_each(|g| *g = 0.0);
        let mut work = vec![0.0; x.len()];
        for (m, (t, y)) in self.problem.terms().iter().zip(&self.aux.values).enumerate() {
            let scale = match self.problem.combiner() {
                Combiner::SumOfFunctions(fs) => (fs[m].derivative)(t.transformed(x, y)),
                _ => 1.0,
            };
            t.add_transformed_gradient(x, y, scale, grad, &mut work);
        }
    }
}

/// Projected-gradient residual of the original objective (smooth combiners).
fn stationarity(problem: &RatioProblem, x: &[f64]) -> Result<Option<f64>> {
    let set = problem.feasible_set();
    Ok(problem
        .objective_gradient(x)?
        .map(|g| projected_residual(x, &g, &|z: &mut [f64]| set.project(z))))
}

/// Alternates the closed-form auxiliary update with the concave inner
/// maximization until the objective change satisfies
/// `|f_t - f_{t-1}| <= tol * (1 + |f_t|)`.
///
/// The objective is reported in the original ratio metric and never decreases.
/// For the max-min combiner the inner problem is the epigraph form, solved by
/// [`maximize_min`], and the recorded residual is that of the final smoothed
/// inner solve.
pub fn fp_solve(
    problem: &RatioProblem,
    inner: &dyn InnerSolver,
    x0: &[f64],
    tol: f64,
    max_iters: usize,
) -> Result<FpSolution> {
    fp_solve_until(problem, inner, x0, tol, max_iters, f64::INFINITY)
}

/// [`fp_solve`] that additionally requires the projected-gradient residual of
/// the original objective to drop to `residual_tol` before stopping. The
/// residual test is skipped for max-min, whose objective is nonsmooth.
pub fn fp_solve_until(
    problem: &RatioProblem,
    inner: &dyn InnerSolver,
    x0: &[f64],
    tol: f64,
    max_iters: usize,
    residual_tol: f64,
) -> Result<FpSolution> {
    fp_solve_with_residual(problem, inner, x0, tol, max_iters, &|x| stationarity(problem, x), residual_tol)
}

/// [`fp_solve_until`] with a caller-supplied stationarity measure, for
/// problems posed in coordinates where the natural residual is misleading.
/// `residual` returns `None` where no smooth measure exists.
pub fn fp_solve_with_residual(
    problem: &RatioProblem,
    inner: &dyn InnerSolver,
    x0: &[f64],
    tol: f64,
    max_iters: usize,
    residual: &dyn Fn(&[f64]) -> Result<Option<f64>>,
    residual_tol: f64,
) -> Result<FpSolution> {
    check_start(problem.feasible_set(), x0)?;
    let mut x = x0.to_vec();
    problem.feasible_set().project(&mut x);
    let mut trace = IterationTrace::new();
    let mut f = problem.objective(&x)?;
    trace.push(f, residual(&x)?.unwrap_or(f64::NAN));
    let mut converged = false;

    for _ in 0..max_iters {
        let aux = problem.optimal_aux(&x)?;
        let (x_new, inner_residual) = match problem.combiner() {
            Combiner::MaxMin => {
                let out = maximize_min(problem, &aux, inner, &x)?;
                (out.x, out.residual)
            }
            _ => {
                let obj = TransformedSum::new(problem, &aux);
                let out = inner.maximize(&obj, problem.feasible_set(), &x)?;
                (out.x, out.residual)
            }
        };
        let f_new = problem.objective(&x_new)?;
        let smooth_residual = residual(&x_new)?;
        let r = smooth_residual.unwrap_or(inner_residual);
        // A bitwise repeat means every later iteration repeats too.
        let frozen = x_new == x;
        x = x_new;
        let prev = f;
        f = f_new;
        trace.push(f, r);
        if objective_settled(prev, f, tol) && smooth_residual.map_or(true, |r| r <= residual_tol) {
            converged = true;
            break;
        }
        if frozen {
            break;
        }
    }

    let aux = problem.optimal_aux(&x)?;
    Ok(FpSolution {
        x,
        aux,
        trace,
        converged,
    })
}

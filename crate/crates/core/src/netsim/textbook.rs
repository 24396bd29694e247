//! Deterministic fixtures on small textbook problems.
//!
//! * `x / (x^2 + 1)` over `x >= 0`, optimum `1/2` at `x = 1`, solved by the
//!   quadratic transform and by Dinkelbach's method;
//! * `x1 / ((x1 - 1)^2 + (x2 - 2)^2 + 1)` over the nonnegative quadrant, the
//!   two-dimensional example with optimum `(1 + sqrt 2) / 2` at `(sqrt 2, 2)`.

use crate::error::Result;
use crate::fp::{dinkelbach_solve, fp_solve, DinkelbachSolution, FeasibleSet, FnRatio, FpSolution, ProjectedGradient, RatioProblem};
use crate::numerics::SolverOptions;

/// Upper bound used in place of `+inf`; far outside every basin of interest.
const BOX_CAP: f64 = 1e3;

/// Optimal value of `x / (x^2 + 1)`.
pub const TEXTBOOK_OPTIMUM: f64 = 0.5;

pub fn textbook_problem() -> RatioProblem {
    RatioProblem::single(
        FnRatio::new(|x| x[0], |x| x[0] * x[0] + 1.0, |_, g| g[0] = 1.0, |x, g| g[0] = 2.0 * x[0]),
        FeasibleSet::boxed(vec![0.0], vec![BOX_CAP]).expect("valid box"),
    )
}

pub fn two_dim_problem() -> RatioProblem {
    RatioProblem::single(
        FnRatio::new(
            |x| x[0],
            |x| (x[0] - 1.0).powi(2) + (x[1] - 2.0).powi(2) + 1.0,
            |_, g| {
                g[0] = 1.0;
                g[1] = 0.0;
            },
            |x, g| {
                g[0] = 2.0 * (x[0] - 1.0);
                g[1] = 2.0 * (x[1] - 2.0);
            },
        ),
        FeasibleSet::boxed(vec![0.0; 2], vec![BOX_CAP; 2]).expect("valid box"),
    )
}

pub fn two_dim_optimum() -> f64 {
    (1.0 + 2f64.sqrt()) / 2.0
}

/// Inner solver accurate enough that fixture sequences match their
/// closed-form recursions to about 1e-12.
pub fn tight_inner() -> ProjectedGradient {
    ProjectedGradient(SolverOptions {
        grad_tol: 1e-13,
        max_inner_iters: 5000,
        ..SolverOptions::default()
    })
}

/// One step of the error sequence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorRow {
    pub iter: usize,
    /// Auxiliary variable (quadratic transform) or parameter (Dinkelbach).
    pub y: f64,
    /// `1/2 - y`.
    pub error: f64,
    /// `error_t / error_{t-1}`; `None` at `t = 0` or once the error is zero.
    pub ratio: Option<f64>,
}

fn rows(ys: &[f64], errors: &[f64]) -> Vec<ErrorRow> {
    (0..ys.len())
        .map(|t| ErrorRow {
            iter: t,
            y: ys[t],
            error: errors[t],
            ratio: (t > 0 && errors[t - 1] != 0.0).then(|| errors[t] / errors[t - 1]),
        })
        .collect()
}

/// Quadratic-transform iteration on `x / (x^2 + 1)` from `y0`.
///
/// With `u = 2y` the two block updates combine to `u' = 2u / (1 + u^(4/3))`.
/// The error `d = 1 - u` is propagated directly,
/// `d' = (expm1((4/3) ln(1 - d)) + 2d) / (1 + (1 - d)^(4/3))`,
/// so the ratio stays accurate long after `y` itself rounds to `1/2`.
/// Also returns the objective at each `x_t = (2 y_{t-1})^(-2/3)`.
pub fn qt_error_sequence(y0: f64, iters: usize) -> (Vec<ErrorRow>, Vec<f64>) {
    assert!(y0 > 0.0 && y0 < 0.5, "start below the fixed point");
    let mut d = 1.0 - 2.0 * y0;
    let mut ds = vec![d];
    let mut objectives = Vec::with_capacity(iters);
    for _ in 0..iters {
        let u = 1.0 - d;
        let x = u.powf(-2.0 / 3.0);
        objectives.push(x / (x * x + 1.0));
        let lead = ((4.0 / 3.0) * (-d).ln_1p()).exp_m1();
        d = (lead + 2.0 * d) / (2.0 + lead);
        ds.push(d);
    }
    let ys: Vec<f64> = ds.iter().map(|d| 0.5 * (1.0 - d)).collect();
    let errors: Vec<f64> = ds.iter().map(|d| 0.5 * d).collect();
    (rows(&ys, &errors), objectives)
}

/// The same iteration run through the generic solver, starting from the `x`
/// that the first update would pick for `y0`.
pub fn qt_generic(y0: f64, iters: usize) -> Result<FpSolution> {
    let x1 = (2.0 * y0).powf(-2.0 / 3.0);
    fp_solve(&textbook_problem(), &tight_inner(), &[x1], 0.0, iters)
}

/// Dinkelbach's method on `x / (x^2 + 1)` from `x0`, through the generic
/// solver, with the error sequence of its parameter.
pub fn dinkelbach_sequence(x0: f64, tol: f64, max_iters: usize) -> Result<(Vec<ErrorRow>, DinkelbachSolution)> {
    let sol = dinkelbach_solve(&textbook_problem(), &tight_inner(), &[x0], tol, max_iters)?;
    let errors: Vec<f64> = sol.y_history.iter().map(|y| TEXTBOOK_OPTIMUM - y).collect();
    Ok((rows(&sol.y_history, &errors), sol))
}

/// Runs the quadratic transform on the two-dimensional example from `x0`.
pub fn two_dim_solve(x0: [f64; 2], tol: f64, max_iters: usize) -> Result<FpSolution> {
    fp_solve(&two_dim_problem(), &tight_inner(), &x0, tol, max_iters)
}

/// Centers of an `n x n` grid of cells covering `[0, 4]^2`.
///
/// Points with `x1 = 0` are avoided: there the numerator vanishes, the
/// optimal auxiliary is zero and the transformed objective is flat.
pub fn two_dim_start_grid(n: usize) -> Vec<[f64; 2]> {
    let step = 4.0 / n as f64;
    (0..n)
        .flat_map(|i| (0..n).map(move |j| [(i as f64 + 0.5) * step, (j as f64 + 0.5) * step]))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn error_ratio_tends_to_one_third() {
        let (rows, objectives) = qt_error_sequence(0.1, 120);
        for r in &rows[30..] {
            assert!((r.ratio.unwrap() - 1.0 / 3.0).abs() < 1e-3, "{r:?}");
        }
        assert!(objectives.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn error_form_matches_direct_updates() {
        // Plain updates y' = sqrt(x) / (x^2 + 1), x = (2y)^(-2/3), while y is far from 1/2.
        let (rows, _) = qt_error_sequence(0.1, 8);
        let mut y: f64 = 0.1;
        for r in &rows[1..] {
            let x = (2.0 * y).powf(-2.0 / 3.0);
            y = x.sqrt() / (x * x + 1.0);
            assert!((r.y - y).abs() < 1e-13);
        }
    }

    #[test]
    fn generic_solver_follows_the_recursion() {
        let (rows, _) = qt_error_sequence(0.1, 12);
        let sol = qt_generic(0.1, 12).unwrap();
        // x_t from the solver against x_t from the recursion.
        let x_end = (1.0 - 2.0 * rows[12].error).powf(-2.0 / 3.0);
        assert!((sol.x[0] - x_end).abs() < 1e-9, "{} vs {}", sol.x[0], x_end);
    }

    #[test]
    fn dinkelbach_is_superlinear() {
        let (rows, sol) = dinkelbach_sequence(2.0, 1e-15, 50).unwrap();
        assert!((rows[0].y - 0.4).abs() < 1e-15);
        assert!(rows.iter().take(6).filter_map(|r| r.ratio).any(|q| q < 0.01));
        assert!((sol.y - 0.5).abs() < 1e-12);
    }

    #[test]
    fn two_dim_from_grid_reaches_global_optimum() {
        for x0 in two_dim_start_grid(4) {
            let sol = two_dim_solve(x0, 1e-13, 2000).unwrap();
            assert!((sol.trace.final_objective() - two_dim_optimum()).abs() < 1e-7, "{x0:?}");
        }
    }
}

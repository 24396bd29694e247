//! Direct quadratic-transform power control and its variants: multi-band,
//! general utilities and max-min SINR. All of them hand a ratio problem in
//! normalized coordinates to the generic alternating solver.

use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{FpError, Result};
use crate::fp::problem::{Combiner, FeasibleSet, FnRatio, OuterFunction, RatioProblem, Term};
use crate::fp::solve::{fp_solve, fp_solve_with_residual, FpSolution, ProjectedGradient};
use crate::numerics::pgm::projected_residual;
use crate::numerics::SolverOptions;
use crate::power::network::{unit_feasible_set, PowerVector, SisoNetwork};
use crate::trace::IterationTrace;

/// Auxiliary variables at termination, in the units of the input network.
#[derive(Debug, Clone, PartialEq)]
pub struct PcAuxState {
    pub y: Vec<f64>,
    /// Dual variables of the closed-form method; equal to the SINRs.
    pub gamma: Option<Vec<f64>>,
}

#[derive(Debug, Clone)]
pub struct PcSolution {
    pub p: PowerVector,
    pub aux: PcAuxState,
    pub trace: IterationTrace,
    pub converged: bool,
}

/// Nondecreasing concave utility of a link rate, with its derivative.
pub struct Utility {
    value: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    derivative: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl Utility {
    pub fn new(
        value: impl Fn(f64) -> f64 + Send + Sync + 'static,
        derivative: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            value: Arc::new(value),
            derivative: Arc::new(derivative),
        }
    }

    /// `w r`; recovers the weighted sum rate.
    pub fn linear(w: f64) -> Self {
        Self::new(move |r| w * r, move |_| w)
    }

    /// `ln(r + eps)`, proportional fairness.
    pub fn log_rate(eps: f64) -> Self {
        Self::new(move |r| (r + eps).ln(), move |r| 1.0 / (r + eps))
    }

    pub fn value(&self, r: f64) -> f64 {
        (self.value)(r)
    }

    pub fn derivative(&self, r: f64) -> f64 {
        (self.derivative)(r)
    }

    /// `U(ln(1 + s))` as a function of the SINR-like quantity `s`.
    fn of_sinr(&self) -> OuterFunction {
        let (v, d) = (self.value.clone(), self.derivative.clone());
        OuterFunction::new(move |s| v(s.ln_1p()), move |s| d(s.ln_1p()) / (1.0 + s))
    }
}

/// Inner projected-gradient settings matched to the outer tolerance.
pub(crate) fn inner_for(tol: f64) -> ProjectedGradient {
    ProjectedGradient(SolverOptions {
        max_inner_iters: 1000,
        grad_tol: (tol * 1e-2).clamp(1e-14, 1e-8),
        ..SolverOptions::default()
    })
}

/// Lower bound of single-band amplitudes `u = sqrt(p / p_max)`.
///
/// At `u_i = 0` the optimal `y_i` is zero and the transformed term of link
/// `i` no longer depends on `u_i`, so a link driven exactly to zero could
/// never come back. The floor is a power of `1e-12 p_max`.
pub const AMPLITUDE_FLOOR: f64 = 1e-6;

/// Coordinates the transformed problem is posed in.
///
/// Single-band problems use amplitudes: with `p = u^2` the numerator root
/// `sqrt(g u^2)` is linear and the denominator a convex quadratic, so the
/// inner problem stays concave without the `sqrt(p)` singularity that stalls
/// projected gradient near zero power. Multi-band problems keep powers, whose
/// per-link budget is a capped simplex.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Coords {
    Power,
    Amplitude,
}

impl Coords {
    fn of(net: &SisoNetwork) -> Self {
        if net.bands() == 1 {
            Coords::Amplitude
        } else {
            Coords::Power
        }
    }

    fn power(self, z: f64) -> f64 {
        match self {
            Coords::Power => z,
            Coords::Amplitude => z * z,
        }
    }

    /// `d power / d z`.
    fn slope(self, z: f64) -> f64 {
        match self {
            Coords::Power => 1.0,
            Coords::Amplitude => 2.0 * z,
        }
    }

    fn set(self, links: usize, bands: usize) -> FeasibleSet {
        match self {
            Coords::Amplitude => FeasibleSet::boxed(vec![AMPLITUDE_FLOOR; links], vec![1.0; links]).expect("floor below the budget"),
            Coords::Power => unit_feasible_set(links, bands),
        }
    }
}

/// SINR ratio terms of every (link, band) pair of a normalized network.
fn sinr_terms(net: &SisoNetwork, coords: Coords) -> Vec<Term> {
    let (n, t) = (net.links(), net.bands());
    let mut terms = Vec::with_capacity(n * t);
    for i in 0..n {
        for b in 0..t {
            let g: Arc<DMatrix<f64>> = Arc::new(net.gains(b).clone());
            let noise = net.noise();
            let (g1, g2, g3, g4) = (g.clone(), g.clone(), g.clone(), g);
            let k = i * t + b;
            terms.push(Term::Scalar(Box::new(FnRatio::new(
                move |x| g1[(i, i)] * coords.power(x[k]),
                move |x| (0..n).filter(|&j| j != i).map(|j| g2[(i, j)] * coords.power(x[j * t + b])).sum::<f64>() + noise,
                move |x, grad| {
                    grad.iter_mut().for_each(|v| *v = 0.0);
                    grad[k] = g3[(i, i)] * coords.slope(x[k]);
                },
                move |x, grad| {
                    grad.iter_mut().for_each(|v| *v = 0.0);
                    for j in (0..n).filter(|&j| j != i) {
                        grad[j * t + b] = g4[(i, j)] * coords.slope(x[j * t + b]);
                    }
                },
            ))));
        }
    }
    terms
}

fn start_point(net: &SisoNetwork, p0: &PowerVector) -> Result<Vec<f64>> {
    p0.check(net)?;
    let x = p0.as_slice().iter().map(|v| (v / net.p_max()).clamp(0.0, 1.0));
    Ok(match Coords::of(net) {
        Coords::Power => x.collect(),
        Coords::Amplitude => x.map(|v| v.sqrt().max(AMPLITUDE_FLOOR)).collect(),
    })
}

/// First-order residual in normalized powers, whatever the coordinates:
/// the gradient in `z` is divided by `d power / d z` and projected on the
/// power set.
fn power_residual(problem: &RatioProblem, net: &SisoNetwork, z: &[f64]) -> Result<Option<f64>> {
    let coords = Coords::of(net);
    let Some(gz) = problem.objective_gradient(z)? else {
        return Ok(None);
    };
    let x: Vec<f64> = z.iter().map(|&v| coords.power(v)).collect();
    let g: Vec<f64> = gz.iter().zip(z).map(|(g, &v)| g / coords.slope(v)).collect();
    let set = unit_feasible_set(net.links(), net.bands());
    Ok(Some(projected_residual(&x, &g, &|v: &mut [f64]| set.project(v))))
}

fn solve_smooth(net: &SisoNetwork, problem: &RatioProblem, p0: &PowerVector, tol: f64, max_iters: usize) -> Result<PcSolution> {
    let x0 = start_point(net, p0)?;
    let residual = |z: &[f64]| power_residual(problem, net, z);
    let sol = fp_solve_with_residual(problem, &inner_for(tol), &x0, tol, max_iters, &residual, 10.0 * tol)?;
    Ok(finish(net, sol, None))
}

fn finish(net: &SisoNetwork, sol: FpSolution, gamma: Option<Vec<f64>>) -> PcSolution {
    let coords = Coords::of(net);
    let sigma = net.noise().sqrt();
    let y = sol.aux.scalars().unwrap_or_default().into_iter().map(|v| v / sigma).collect();
    let values = sol.x.iter().map(|&v| coords.power(v) * net.p_max()).collect();
    PcSolution {
        p: PowerVector::new(net.links(), net.bands(), values).expect("solver keeps the shape"),
        aux: PcAuxState { y, gamma },
        trace: sol.trace,
        converged: sol.converged,
    }
}

/// The direct transformed problem for per-link utilities (single band, in
/// amplitudes).
pub(crate) fn utility_problem(net: &SisoNetwork, utilities: &[Utility]) -> Result<RatioProblem> {
    if utilities.len() != net.links() {
        return Err(FpError::Dimension {
            context: "utilities vs links",
            expected: net.links(),
            got: utilities.len(),
        });
    }
    if net.bands() != 1 {
        return Err(FpError::Usage("general utilities are defined for single-band networks".into()));
    }
    let norm = net.normalized();
    let outer = utilities.iter().map(Utility::of_sinr).collect();
    let coords = Coords::of(net);
    RatioProblem::new(sinr_terms(&norm, coords), Combiner::SumOfFunctions(outer), coords.set(net.links(), 1))
}

/// The direct transformed problem of the weighted sum rate, any number of bands.
pub(crate) fn sum_rate_problem(net: &SisoNetwork) -> Result<RatioProblem> {
    let norm = net.normalized();
    let t = net.bands();
    let outer = (0..net.links())
        .flat_map(|i| {
            let w = net.weights()[i] / t as f64;
            (0..t).map(move |_| OuterFunction::weighted_log1p(w))
        })
        .collect();
    let coords = Coords::of(net);
    RatioProblem::new(sinr_terms(&norm, coords), Combiner::SumOfFunctions(outer), coords.set(net.links(), t))
}

/// Direct FP power control: alternates the closed-form `y` update with a
/// projected-gradient maximization of the transformed weighted sum rate.
///
/// Stops when the relative rate change is at most `tol` and the first-order
/// residual (see [`foc_residual`](crate::power::foc_residual)) is at most `10 tol`.
pub fn pc_direct_solve(net: &SisoNetwork, p0: &PowerVector, tol: f64, max_iters: usize) -> Result<PcSolution> {
    if net.bands() == 1 {
        let utilities: Vec<Utility> = net.weights().iter().map(|&w| Utility::linear(w)).collect();
        pc_utility_solve(net, &utilities, p0, tol, max_iters)
    } else {
        pc_multiband_solve(net, p0, tol, max_iters)
    }
}

/// Direct FP over several bands with a per-transmitter sum-power budget.
pub fn pc_multiband_solve(net: &SisoNetwork, p0: &PowerVector, tol: f64, max_iters: usize) -> Result<PcSolution> {
    let problem = sum_rate_problem(net)?;
    solve_smooth(net, &problem, p0, tol, max_iters)
}

/// Direct FP for `sum_i U_i(R_i)` with nondecreasing concave utilities.
/// The trace reports `sum_i U_i(R_i)`.
pub fn pc_utility_solve(
    net: &SisoNetwork,
    utilities: &[Utility],
    p0: &PowerVector,
    tol: f64,
    max_iters: usize,
) -> Result<PcSolution> {
    let problem = utility_problem(net, utilities)?;
    solve_smooth(net, &problem, p0, tol, max_iters)
}

/// Maximizes the minimum SINR. The trace reports the minimum SINR (linear).
pub fn pc_maxmin_solve(net: &SisoNetwork, p0: &PowerVector, tol: f64, max_iters: usize) -> Result<PcSolution> {
    if net.bands() != 1 {
        return Err(FpError::Usage("max-min power control is defined for single-band networks".into()));
    }
    p0.check(net)?;
    if p0.as_slice().iter().any(|v| *v <= 0.0) {
        return Err(FpError::Infeasible("max-min power control needs strictly positive starting powers".into()));
    }
    let x0 = start_point(net, p0)?;
    let norm = net.normalized();
    let coords = Coords::of(net);
    let problem = RatioProblem::new(sinr_terms(&norm, coords), Combiner::MaxMin, coords.set(net.links(), 1))?;
    let sol = fp_solve(&problem, &inner_for(tol), &x0, tol, max_iters)?;
    Ok(finish(net, sol, None))
}

/// The transformed objective of the direct method at fixed `y` (normalized
/// coordinates), exposed for gradient checks.
#[cfg(test)]
pub(crate) fn transformed_value_and_gradient(problem: &RatioProblem, aux: &crate::fp::AuxiliaryVector, x: &[f64]) -> (f64, Vec<f64>) {
    use crate::numerics::pgm::SmoothObjective;
    let obj = crate::fp::solve::TransformedSum::new(problem, aux);
    let mut g = vec![0.0; x.len()];
    obj.gradient(x, &mut g);
    (obj.value(x), g)
}

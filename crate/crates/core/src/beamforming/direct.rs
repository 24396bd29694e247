//! Direct FP beamforming: the multidimensional transform on every stream
//! SINR, with a projected-gradient inner solve over per-BS power balls.

use std::sync::Arc;

use num_complex::Complex64;

use crate::beamforming::network::{covariance, BeamformerSet, MimoNetwork};
use crate::error::Result;
use crate::fp::problem::{Combiner, MatrixRatioTerm, OuterFunction, RatioProblem, Term};
use crate::fp::solve::fp_solve_until;
use crate::numerics::linalg::{unpack, CMat, CVec};
use crate::power::direct::inner_for;
use crate::trace::IterationTrace;

/// Auxiliary variables at termination, in the units of the input network.
#[derive(Debug, Clone, PartialEq)]
pub struct BfAuxState {
    pub y: Vec<CVec>,
    /// Closed-form method only: stream SINRs.
    pub gamma: Option<Vec<f64>>,
    /// Closed-form method only: per-BS power prices.
    pub eta: Option<Vec<f64>>,
}

#[derive(Debug, Clone)]
pub struct BfSolution {
    pub v: BeamformerSet,
    pub aux: BfAuxState,
    pub trace: IterationTrace,
    pub converged: bool,
}

/// SINR of stream `k` as a ratio of the packed beamformers: numerator
/// `H_{k,b(k)} v_k`, denominator the interference-plus-noise covariance.
struct StreamSinr {
    net: Arc<MimoNetwork>,
    k: usize,
}

impl StreamSinr {
    fn vectors(&self, x: &[f64]) -> Vec<CVec> {
        unpack(x, &vec![self.net.tx_antennas(); self.net.stream_count()])
    }
}

impl MatrixRatioTerm for StreamSinr {
    fn numerator(&self, x: &[f64]) -> CVec {
        let v = self.vectors(x);
        self.net.channel(self.k, self.net.bs_of(self.k)) * &v[self.k]
    }

    fn denominator(&self, x: &[f64]) -> CMat {
        covariance(&self.net, &self.vectors(x), self.k, true)
    }

    /// Real gradient `2 d/d(conj v_l)` of `2 Re{y^H H v_k} - y^H C y`.
    fn transformed_gradient(&self, x: &[f64], y: &CVec, grad: &mut [f64]) {
        let net = &self.net;
        let v = self.vectors(x);
        let m = net.tx_antennas();
        grad.iter_mut().for_each(|g| *g = 0.0);
        for (l, vl) in v.iter().enumerate() {
            let h = net.channel(self.k, net.bs_of(l));
            let hy = h.adjoint() * y;
            let d: CVec = if l == self.k {
                hy * Complex64::new(2.0, 0.0)
            } else {
                let proj = y.dotc(&(h * vl));
                hy * (-2.0 * proj)
            };
            for (a, z) in d.iter().enumerate() {
                grad[2 * (l * m + a)] = z.re;
                grad[2 * (l * m + a) + 1] = z.im;
            }
        }
    }
}

/// Weighted sum rate as a sum-of-log ratio problem over the packed
/// beamformers of `net` (used on the normalized network).
pub(crate) fn sum_rate_problem(net: &MimoNetwork) -> Result<RatioProblem> {
    let shared = Arc::new(net.clone());
    let terms = (0..net.stream_count())
        .map(|k| Term::Matrix(Box::new(StreamSinr { net: shared.clone(), k })))
        .collect();
    let outer = net.weights().iter().map(|&w| OuterFunction::weighted_log1p(w)).collect();
    RatioProblem::new(terms, Combiner::SumOfFunctions(outer), net.feasible_set())
}

/// Projected-gradient residual of the weighted sum rate at packed `x`.
pub(crate) fn stationarity(problem: &RatioProblem, x: &[f64]) -> Result<f64> {
    let g = problem.objective_gradient(x)?.expect("sum-of-functions is smooth");
    let set = problem.feasible_set();
    Ok(crate::numerics::pgm::projected_residual(x, &g, &|z: &mut [f64]| set.project(z)))
}

pub(crate) fn start_point(net: &MimoNetwork, v0: &BeamformerSet) -> Result<Vec<f64>> {
    v0.check(net)?;
    let mut x = v0.scaled(1.0 / net.p_max().sqrt()).pack();
    net.normalized().feasible_set().project(&mut x);
    Ok(x)
}

/// Direct FP beamforming.
///
/// Stops when the relative rate change is at most `tol` and the
/// projected-gradient residual, in beamformers scaled by `1/sqrt(p_max)`, is at
/// most `10 tol`.
pub fn bf_direct_solve(net: &MimoNetwork, v0: &BeamformerSet, tol: f64, max_iters: usize) -> Result<BfSolution> {
    let x0 = start_point(net, v0)?;
    let norm = net.normalized();
    let problem = sum_rate_problem(&norm)?;
    let sol = fp_solve_until(&problem, &inner_for(tol), &x0, tol, max_iters, 10.0 * tol)?;
    let inv_sigma = Complex64::new(1.0 / net.noise().sqrt(), 0.0);
    let y = sol
        .aux
        .values
        .iter()
        .map(|a| match a {
            crate::fp::AuxValue::Vector(y) => y * inv_sigma,
            crate::fp::AuxValue::Scalar(_) => unreachable!("matrix terms give vector auxiliaries"),
        })
        .collect();
    Ok(BfSolution {
        v: BeamformerSet::unpack(&sol.x, net).scaled(net.p_max().sqrt()),
        aux: BfAuxState {
            y,
            gamma: None,
            eta: None,
        },
        trace: sol.trace,
        converged: sol.converged,
    })
}

//! Energy efficiency of a multi-antenna broadcast channel by nested
//! quadratic transforms: one on the efficiency ratio, one on every SINR
//! inside the rate sum.

use num_complex::Complex64;

use crate::beamforming::direct::sum_rate_problem;
use crate::beamforming::{bf_weighted_sum_rate, BeamformerSet, MimoNetwork};
use crate::error::{FpError, Result};
use crate::fp::problem::{AuxiliaryVector, FeasibleSet, RatioProblem};
use crate::fp::AuxValue;
use crate::fp::InnerSolver;
use crate::numerics::linalg::CVec;
use crate::numerics::pgm::{projected_residual, SmoothObjective};
use crate::power::direct::inner_for;
use crate::trace::{objective_settled, IterationTrace};

/// One transmitter serving `K` single-stream receivers under a total budget.
#[derive(Debug, Clone, PartialEq)]
pub struct BroadcastNetwork {
    inner: MimoNetwork,
    p_on: f64,
}

impl BroadcastNetwork {
    /// `channels[k]` is the `N x M` channel to receiver `k`; needs `K <= M`.
    pub fn new(channels: Vec<crate::numerics::CMat>, noise: f64, p_max: f64, p_on: f64) -> Result<Self> {
        if !(p_on > 0.0) || !p_on.is_finite() {
            return Err(FpError::domain("BroadcastNetwork", format!("p_on must be positive, got {p_on}")));
        }
        let k = channels.len();
        let inner = MimoNetwork::new(1, k, channels.into_iter().map(|h| vec![h]).collect(), vec![1.0; k], noise, p_max)?;
        Ok(Self { inner, p_on })
    }

    pub fn receivers(&self) -> usize {
        self.inner.stream_count()
    }

    pub fn p_on(&self) -> f64 {
        self.p_on
    }

    pub fn p_max(&self) -> f64 {
        self.inner.p_max()
    }

    /// The same channels viewed as a one-cell MIMO network with unit weights.
    pub fn as_mimo(&self) -> &MimoNetwork {
        &self.inner
    }
}

/// `sum_m R_m(V) / (sum_m ||v_m||^2 + p_on)`.
pub fn ee_objective(v: &BeamformerSet, net: &BroadcastNetwork) -> Result<f64> {
    let rate = bf_weighted_sum_rate(v, &net.inner)?;
    Ok(rate / (v.bs_power(&net.inner, 0) + net.p_on))
}

#[derive(Debug, Clone, PartialEq)]
pub struct EeAuxState {
    /// Outer ratio variable.
    pub y_outer: f64,
    /// Per-receiver SINR transform variables.
    pub z: Vec<CVec>,
}

#[derive(Debug, Clone)]
pub struct EeSolution {
    pub v: BeamformerSet,
    pub aux: EeAuxState,
    pub trace: IterationTrace,
    pub converged: bool,
}

/// `2 y sqrt(sum_m ln(1 + q_m(V, z_m))) - y^2 (||V||^2 + p_on)` for fixed
/// `y` and `Z`, in normalized units. NaN where a log argument or the rate
/// sum goes negative, which the line search rejects.
struct NestedObjective<'a> {
    rates: &'a RatioProblem,
    z: &'a AuxiliaryVector,
    y: f64,
    p_on: f64,
}

impl NestedObjective<'_> {
    fn inner_terms(&self, x: &[f64]) -> Vec<f64> {
        self.rates.terms().iter().zip(&self.z.values).map(|(t, z)| t.transformed(x, z)).collect()
    }
}

impl SmoothObjective for NestedObjective<'_> {
    fn value(&self, x: &[f64]) -> f64 {
        let q = self.inner_terms(x);
        if q.iter().any(|v| !(*v > -1.0)) {
            return f64::NAN;
        }
        let s: f64 = q.iter().map(|v| v.ln_1p()).sum();
        if !(s >= 0.0) {
            return f64::NAN;
        }
        let power: f64 = x.iter().map(|v| v * v).sum();
        2.0 * self.y * s.sqrt() - self.y * self.y * (power + self.p_on)
    }

    fn gradient(&self, x: &[f64], grad: &mut [f64]) {
        let q = self.inner_terms(x);
        let s: f64 = q.iter().map(|v| v.ln_1p()).sum::<f64>().max(1e-300);
        let outer = self.y / s.sqrt();
        for (g, xi) in grad.iter_mut().zip(x) {
            *g = -2.0 * self.y * self.y * xi;
        }
        let mut work = vec![0.0; x.len()];
        for ((t, z), qm) in self.rates.terms().iter().zip(&self.z.values).zip(&q) {
            t.add_transformed_gradient(x, z, outer / (1.0 + qm), grad, &mut work);
        }
    }
}

/// Efficiency in normalized units and its projected-gradient residual.
fn ee_and_residual(rates: &RatioProblem, set: &FeasibleSet, x: &[f64], p_on: f64) -> Result<(f64, f64)> {
    let r = rates.objective(x)?;
    let d = x.iter().map(|v| v * v).sum::<f64>() + p_on;
    let gr = rates.objective_gradient(x)?.expect("rate sum is smooth");
    let g: Vec<f64> = gr.iter().zip(x).map(|(a, xi)| (a * d - r * 2.0 * xi) / (d * d)).collect();
    Ok((r / d, projected_residual(x, &g, &|z: &mut [f64]| set.project(z))))
}

/// Nested FP for broadcast energy efficiency.
///
/// Each cycle sets `Z` by the SINR transform, then `y` by the ratio
/// transform, then maximizes the doubly transformed objective over `V` by
/// projected gradient. The efficiency never decreases. Stops when its
/// relative change is at most `tol` and the projected-gradient residual, in
/// beamformers scaled by `1/sqrt(p_max)`, is at most `10 tol`.
pub fn ee_nested_solve(net: &BroadcastNetwork, v0: &BeamformerSet, tol: f64, max_iters: usize) -> Result<EeSolution> {
    v0.check(&net.inner)?;
    if v0.vectors.iter().all(|v| v.iter().all(|z| *z == Complex64::new(0.0, 0.0))) {
        return Err(FpError::Infeasible("all-zero beamformers give a zero rate sum and no ascent direction".into()));
    }
    let p_max = net.p_max();
    let norm = net.inner.normalized();
    let p_on = net.p_on / p_max;
    let rates = sum_rate_problem(&norm)?;
    let set = norm.feasible_set();
    let inner = inner_for(tol);

    let mut x = v0.scaled(1.0 / p_max.sqrt()).pack();
    set.project(&mut x);
    let mut trace = IterationTrace::new();
    let (mut f, r) = ee_and_residual(&rates, &set, &x, p_on)?;
    trace.push(f / p_max, r);
    let mut z = rates.optimal_aux(&x)?;
    let mut y = 0.0;
    let mut converged = false;

    for _ in 0..max_iters {
        z = rates.optimal_aux(&x)?;
        let d = x.iter().map(|v| v * v).sum::<f64>() + p_on;
        y = rates.objective(&x)?.sqrt() / d;
        let obj = NestedObjective {
            rates: &rates,
            z: &z,
            y,
            p_on,
        };
        x = inner.maximize(&obj, &set, &x)?.x;
        let prev = f;
        let (fe, r) = ee_and_residual(&rates, &set, &x, p_on)?;
        f = fe;
        trace.push(f / p_max, r);
        if objective_settled(prev, f, tol) && r <= 10.0 * tol {
            converged = true;
            break;
        }
    }

    let inv_sigma = Complex64::new(1.0 / net.inner.noise().sqrt(), 0.0);
    let z = z
        .values
        .into_iter()
        .map(|a| match a {
            AuxValue::Vector(v) => v * inv_sigma,
            AuxValue::Scalar(_) => unreachable!("matrix terms give vector auxiliaries"),
        })
        .collect();
    Ok(EeSolution {
        v: BeamformerSet::unpack(&x, &norm).scaled(p_max.sqrt()),
        // y scales like sqrt(rate) / power.
        aux: EeAuxState { y_outer: y / p_max, z },
        trace,
        converged,
    })
}

//! Closed-form FP power control and the classic fixed-point baseline.
//!
//! Both work on the normalized network (unit noise, unit budget), where the
//! updates are scale free, and report powers in watts.

use crate::error::{FpError, Result};
use crate::power::direct::{PcAuxState, PcSolution};
use crate::power::network::{foc_residual, sinr, weighted_sum_rate, PowerVector, SisoNetwork};
use crate::trace::{objective_settled, IterationTrace};

/// Fixed-point powers are floored at this fraction of `p_max`.
pub const FIXED_POINT_FLOOR: f64 = 1e-12;

/// `y_i = sqrt(w_i (1 + gamma_i) g_ii p_i) / (sum_j g_ij p_j + sigma^2)`.
pub fn closed_form_y(net: &SisoNetwork, p: &[f64], gamma: &[f64]) -> Vec<f64> {
    let g = net.gains(0);
    let n = net.links();
    (0..n)
        .map(|i| {
            let total: f64 = (0..n).map(|j| g[(i, j)] * p[j]).sum::<f64>() + net.noise();
            (net.weights()[i] * (1.0 + gamma[i]) * g[(i, i)] * p[i]).sqrt() / total
        })
        .collect()
}

/// Unclamped closed-form power update
/// `p_i = w_i (1 + gamma_i) g_ii y_i^2 / (sum_j y_j^2 g_ji)^2`.
pub fn closed_form_p_unclamped(net: &SisoNetwork, gamma: &[f64], y: &[f64]) -> Vec<f64> {
    let g = net.gains(0);
    let n = net.links();
    (0..n)
        .map(|i| {
            let d: f64 = (0..n).map(|j| y[j] * y[j] * g[(j, i)]).sum();
            net.weights()[i] * (1.0 + gamma[i]) * g[(i, i)] * y[i] * y[i] / (d * d)
        })
        .collect()
}

/// The same update written as a fixed point of the first-order condition,
/// `(T1_i / T2_i)^2` with `T1_i = w_i gamma_i / sqrt(p_i)` and
/// `T2_i = sum_j w_j gamma_j^2 g_ji / ((1 + gamma_j) g_jj p_j)`, all from `p`.
pub fn closed_form_p_fixed_point(net: &SisoNetwork, p: &[f64]) -> Vec<f64> {
    let g = net.gains(0);
    let n = net.links();
    let gamma = sinr(&PowerVector::from_vec(p.to_vec()), net);
    let w = net.weights();
    (0..n)
        .map(|i| {
            let t1 = w[i] * gamma[i] / p[i].sqrt();
            let t2: f64 = (0..n)
                .map(|j| w[j] * gamma[j] * gamma[j] * g[(j, i)] / ((1.0 + gamma[j]) * g[(j, j)] * p[j]))
                .sum();
            (t1 / t2).powi(2)
        })
        .collect()
}

fn single_band(net: &SisoNetwork, p0: &PowerVector) -> Result<()> {
    if net.bands() != 1 {
        return Err(FpError::Usage("use the multi-band solver for more than one band".into()));
    }
    p0.check(net)
}

/// Closed-form FP power control.
///
/// Each cycle sets `gamma` to the SINRs of the current powers, then `y`, then
/// the clamped closed-form powers. The dual update goes first so that `y` is
/// optimal for the `(p, gamma)` pair it is used with; every cycle is then a
/// block ascent step and the weighted sum rate never decreases.
///
/// Stops when the relative rate change is at most `tol` and the first-order
/// residual is at most `10 tol`.
pub fn pc_closed_form_solve(net: &SisoNetwork, p0: &PowerVector, tol: f64, max_iters: usize) -> Result<PcSolution> {
    single_band(net, p0)?;
    let norm = net.normalized();
    let mut x: Vec<f64> = p0.as_slice().iter().map(|v| (v / net.p_max()).clamp(0.0, 1.0)).collect();
    let rate = |x: &[f64]| weighted_sum_rate(&PowerVector::from_vec(x.to_vec()), &norm);
    let residual = |x: &[f64]| foc_residual(&PowerVector::from_vec(x.to_vec()), &norm);

    let mut trace = IterationTrace::new();
    let mut f = rate(&x);
    trace.push(f, residual(&x));
    let mut gamma = sinr(&PowerVector::from_vec(x.clone()), &norm);
    let mut y = closed_form_y(&norm, &x, &gamma);
    let mut converged = false;

    for _ in 0..max_iters {
        gamma = sinr(&PowerVector::from_vec(x.clone()), &norm);
        y = closed_form_y(&norm, &x, &gamma);
        x = closed_form_p_unclamped(&norm, &gamma, &y)
            .into_iter()
            .map(|v| if v.is_finite() { v.clamp(0.0, 1.0) } else { 1.0 })
            .collect();
        let prev = f;
        f = rate(&x);
        let r = residual(&x);
        trace.push(f, r);
        if objective_settled(prev, f, tol) && r <= 10.0 * tol {
            converged = true;
            break;
        }
    }

    let sigma = net.noise().sqrt();
    Ok(PcSolution {
        p: PowerVector::from_vec(x.iter().map(|v| v * net.p_max()).collect()),
        aux: PcAuxState {
            y: y.iter().map(|v| v / sigma).collect(),
            gamma: Some(gamma),
        },
        trace,
        converged,
    })
}

#[derive(Debug, Clone)]
pub struct FixedPointResult {
    pub p: PowerVector,
    pub trace: IterationTrace,
    /// False when the iteration did not settle within `max_iters`; this is an
    /// expected outcome of the method, not an error.
    pub converged: bool,
}

/// Fixed-point baseline `p_i <- min(p_max, T1_i / T2_i)` with
/// `T1_i = w_i gamma_i / (1 + gamma_i)` and
/// `T2_i = sum_{j != i} w_j gamma_j^2 g_ji / ((1 + gamma_j) g_jj p_j)`.
///
/// Powers are floored at `FIXED_POINT_FLOOR * p_max` to keep `T2` finite.
/// Converged when no power moves by more than `tol * p_max` in one step.
pub fn pc_fixed_point_solve(net: &SisoNetwork, p0: &PowerVector, tol: f64, max_iters: usize) -> Result<FixedPointResult> {
    single_band(net, p0)?;
    if p0.as_slice().iter().any(|v| *v <= 0.0) {
        return Err(FpError::Infeasible("the fixed-point iteration needs strictly positive powers".into()));
    }
    let norm = net.normalized();
    let g = norm.gains(0);
    let w = norm.weights();
    let n = net.links();
    let mut x: Vec<f64> = p0.as_slice().iter().map(|v| (v / net.p_max()).clamp(FIXED_POINT_FLOOR, 1.0)).collect();
    let mut trace = IterationTrace::new();
    let stats = |x: &[f64]| {
        let p = PowerVector::from_vec(x.to_vec());
        (weighted_sum_rate(&p, &norm), foc_residual(&p, &norm))
    };
    let (f, r) = stats(&x);
    trace.push(f, r);
    let mut converged = false;

    for _ in 0..max_iters {
        let gamma = sinr(&PowerVector::from_vec(x.clone()), &norm);
        let next: Vec<f64> = (0..n)
            .map(|i| {
                let t1 = w[i] * gamma[i] / (1.0 + gamma[i]);
                let t2: f64 = (0..n)
                    .filter(|&j| j != i)
                    .map(|j| w[j] * gamma[j] * gamma[j] * g[(j, i)] / ((1.0 + gamma[j]) * g[(j, j)] * x[j]))
                    .sum();
                let v = t1 / t2;
                if v.is_finite() { v.clamp(FIXED_POINT_FLOOR, 1.0) } else { 1.0 }
            })
            .collect();
        let step = next.iter().zip(&x).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        x = next;
        let (f, r) = stats(&x);
        trace.push(f, r);
        if step <= tol {
            converged = true;
            break;
        }
    }

    Ok(FixedPointResult {
        p: PowerVector::from_vec(x.iter().map(|v| v * net.p_max()).collect()),
        trace,
        converged,
    })
}

//! Closed-form FP beamforming with per-BS power prices found by bisection.

use num_complex::Complex64;

use crate::beamforming::direct::{start_point, stationarity, sum_rate_problem, BfAuxState, BfSolution};
use crate::beamforming::network::{covariance, stream_sinr, BeamformerSet, MimoNetwork};
use crate::error::Result;
use crate::numerics::linalg::{add_outer, hpd_solve, norm_sqr, CMat, CVec};
use crate::numerics::{bisection_root, HpdFactor};
use crate::trace::{objective_settled, IterationTrace};

/// The per-BS beamformer update for fixed `y` and `gamma`:
/// `v_k(eta) = (eta I + A)^{-1} b_k` for the streams `k` of one BS, with
/// `A = sum_l H_{l,i}^H y_l y_l^H H_{l,i}` over all streams `l` and
/// `b_k = sqrt(w_k (1 + gamma_k)) H_{k,i}^H y_k`.
#[derive(Debug, Clone)]
pub struct BsDual {
    pub a: CMat,
    pub b: Vec<CVec>,
    pub p_max: f64,
}

impl BsDual {
    /// Beamformers at price `eta`; `None` if `eta I + A` is singular.
    pub fn beamformers(&self, eta: f64) -> Option<Vec<CVec>> {
        if self.b.iter().all(|b| b.iter().all(|z| *z == Complex64::new(0.0, 0.0))) {
            return Some(self.b.clone());
        }
        let m = self.a.nrows();
        let shifted = &self.a + CMat::identity(m, m) * Complex64::new(eta, 0.0);
        let f = HpdFactor::new(&shifted).ok()?;
        self.b.iter().map(|b| f.solve(b).ok()).collect()
    }

    /// `sum_k ||v_k(eta)||^2 - p_max`, `+inf` where the update is undefined.
    pub fn power_gap(&self, eta: f64) -> f64 {
        match self.beamformers(eta) {
            Some(v) => v.iter().map(norm_sqr).sum::<f64>() - self.p_max,
            None => f64::INFINITY,
        }
    }

    /// Smallest `eta >= 0` whose beamformers meet the budget. Zero when the
    /// unpriced update is already feasible; otherwise bisected to floating
    /// point resolution, returning the feasible end of the final bracket.
    pub fn optimal_eta(&self) -> Result<f64> {
        if self.power_gap(0.0) <= 0.0 {
            return Ok(0.0);
        }
        bisection_root(|eta| self.power_gap(eta), 0.0, 1.0, 0.0)
    }
}

/// Per-BS update data of one closed-form cycle.
#[derive(Debug, Clone)]
pub struct DualState {
    pub per_bs: Vec<BsDual>,
}

impl DualState {
    pub fn new(net: &MimoNetwork, gamma: &[f64], y: &[CVec]) -> Self {
        let m = net.tx_antennas();
        let per_bs = (0..net.cells())
            .map(|i| {
                let mut a = CMat::zeros(m, m);
                for (l, yl) in y.iter().enumerate() {
                    add_outer(&mut a, &(net.channel(l, i).adjoint() * yl), 1.0);
                }
                let b = (i * net.streams_per_cell()..(i + 1) * net.streams_per_cell())
                    .map(|k| {
                        let c = (net.weights()[k] * (1.0 + gamma[k])).sqrt();
                        net.channel(k, i).adjoint() * &y[k] * Complex64::new(c, 0.0)
                    })
                    .collect();
                BsDual { a, b, p_max: net.p_max() }
            })
            .collect();
        Self { per_bs }
    }
}

/// `sum_m ||v_{im}(eta)||^2 - p_max` for BS `bs`; decreasing in `eta`.
pub fn eta_power(eta: f64, bs: usize, state: &DualState) -> f64 {
    state.per_bs[bs].power_gap(eta)
}

/// `y_k = T_k^{-1} sqrt(w_k (1 + gamma_k)) H_{k,b(k)} v_k` with the full
/// received covariance `T_k`, own stream included.
pub fn closed_form_y(net: &MimoNetwork, v: &[CVec], gamma: &[f64]) -> Result<Vec<CVec>> {
    (0..net.stream_count())
        .map(|k| {
            let c = (net.weights()[k] * (1.0 + gamma[k])).sqrt();
            let a = net.channel(k, net.bs_of(k)) * &v[k] * Complex64::new(c, 0.0);
            hpd_solve(&covariance(net, v, k, false), &a)
        })
        .collect()
}

/// Closed-form FP beamforming.
///
/// Each cycle sets `gamma` to the stream SINRs, then `y`, then the priced
/// beamformers of every BS with the price from [`BsDual::optimal_eta`]. The
/// weighted sum rate never decreases. Stops under the same rule as
/// [`bf_direct_solve`](crate::beamforming::bf_direct_solve).
pub fn bf_closed_form_solve(net: &MimoNetwork, v0: &BeamformerSet, tol: f64, max_iters: usize) -> Result<BfSolution> {
    let x0 = start_point(net, v0)?;
    let norm = net.normalized();
    let problem = sum_rate_problem(&norm)?;
    let mut v = BeamformerSet::unpack(&x0, &norm);
    let rate = |v: &BeamformerSet| crate::beamforming::network::bf_weighted_sum_rate(v, &norm);

    let mut trace = IterationTrace::new();
    let mut f = rate(&v)?;
    trace.push(f, stationarity(&problem, &v.pack())?);
    let mut gamma = stream_sinr(&v, &norm)?;
    let mut y = closed_form_y(&norm, &v.vectors, &gamma)?;
    let mut eta = vec![0.0; net.cells()];
    let mut converged = false;

    for _ in 0..max_iters {
        gamma = stream_sinr(&v, &norm)?;
        y = closed_form_y(&norm, &v.vectors, &gamma)?;
        let dual = DualState::new(&norm, &gamma, &y);
        let mut next = Vec::with_capacity(norm.stream_count());
        for (i, bs) in dual.per_bs.iter().enumerate() {
            eta[i] = bs.optimal_eta()?;
            next.extend(bs.beamformers(eta[i]).expect("optimal price gives a defined update"));
        }
        v = BeamformerSet { vectors: next };
        let prev = f;
        f = rate(&v)?;
        let r = stationarity(&problem, &v.pack())?;
        trace.push(f, r);
        if objective_settled(prev, f, tol) && r <= 10.0 * tol {
            converged = true;
            break;
        }
    }

    let inv_sigma = Complex64::new(1.0 / net.noise().sqrt(), 0.0);
    Ok(BfSolution {
        v: v.scaled(net.p_max().sqrt()),
        aux: BfAuxState {
            y: y.iter().map(|y| y * inv_sigma).collect(),
            gamma: Some(gamma),
            eta: Some(eta.iter().map(|e| e / net.p_max()).collect()),
        },
        trace,
        converged,
    })
}

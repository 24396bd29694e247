use nalgebra::DMatrix;

use crate::error::{FpError, Result};
use crate::numerics::pgm::projected_residual;
use crate::fp::FeasibleSet;

/// Single-antenna downlink network, one scheduled user per transmitter.
///
/// `gains[t][(i, j)]` is the power gain from transmitter `j` to the user of
/// transmitter `i` on band `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct SisoNetwork {
    gains: Vec<DMatrix<f64>>,
    weights: Vec<f64>,
    noise: f64,
    p_max: f64,
}

impl SisoNetwork {
    pub fn new(gains: DMatrix<f64>, weights: Vec<f64>, noise: f64, p_max: f64) -> Result<Self> {
        Self::multiband(vec![gains], weights, noise, p_max)
    }

    pub fn multiband(gains: Vec<DMatrix<f64>>, weights: Vec<f64>, noise: f64, p_max: f64) -> Result<Self> {
        let n = weights.len();
        if n == 0 || gains.is_empty() {
            return Err(FpError::domain("SisoNetwork", "needs at least one link and one band"));
        }
        for g in &gains {
            if g.nrows() != n || g.ncols() != n {
                return Err(FpError::Dimension {
                    context: "SisoNetwork gains",
                    expected: n,
                    got: g.nrows().max(g.ncols()),
                });
            }
            if g.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
                return Err(FpError::domain("SisoNetwork", "gains must be finite and nonnegative"));
            }
        }
        // Per-band direct gains may vanish (dead tones) but not on every band.
        for i in 0..n {
            if gains.iter().all(|g| g[(i, i)] == 0.0) {
                return Err(FpError::domain("SisoNetwork", format!("direct gain of link {i} is zero")));
            }
        }
        if gains.len() == 1 && (0..n).any(|i| gains[0][(i, i)] == 0.0) {
            return Err(FpError::domain("SisoNetwork", "direct gains must be positive"));
        }
        if weights.iter().any(|w| !(*w >= 0.0) || !w.is_finite()) {
            return Err(FpError::domain("SisoNetwork", "weights must be nonnegative"));
        }
        if !(noise > 0.0) || !noise.is_finite() {
            return Err(FpError::domain("SisoNetwork", format!("noise must be positive, got {noise}")));
        }
        if !(p_max > 0.0) || !p_max.is_finite() {
            return Err(FpError::domain("SisoNetwork", format!("p_max must be positive, got {p_max}")));
        }
        Ok(Self {
            gains,
            weights,
            noise,
            p_max,
        })
    }

    pub fn links(&self) -> usize {
        self.weights.len()
    }

    pub fn bands(&self) -> usize {
        self.gains.len()
    }

    pub fn gains(&self, band: usize) -> &DMatrix<f64> {
        &self.gains[band]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn noise(&self) -> f64 {
        self.noise
    }

    pub fn p_max(&self) -> f64 {
        self.p_max
    }

    pub fn with_weights(mut self, weights: Vec<f64>) -> Result<Self> {
        let gains = std::mem::take(&mut self.gains);
        Self::multiband(gains, weights, self.noise, self.p_max)
    }

    /// Same network with gains scaled by `p_max / noise`, unit noise and unit
    /// power budget. SINRs and rates are unchanged under `p -> p / p_max`.
    pub(crate) fn normalized(&self) -> Self {
        let s = self.p_max / self.noise;
        Self {
            gains: self.gains.iter().map(|g| g * s).collect(),
            weights: self.weights.clone(),
            noise: 1.0,
            p_max: 1.0,
        }
    }
}

/// Transmit powers, `links x bands`, stored link-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerVector {
    links: usize,
    bands: usize,
    values: Vec<f64>,
}

impl PowerVector {
    pub fn new(links: usize, bands: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != links * bands {
            return Err(FpError::Dimension {
                context: "PowerVector",
                expected: links * bands,
                got: values.len(),
            });
        }
        Ok(Self { links, bands, values })
    }

    /// Single-band powers.
    pub fn from_vec(values: Vec<f64>) -> Self {
        Self {
            links: values.len(),
            bands: 1,
            values,
        }
    }

    /// Every link at `level`, split evenly over the bands.
    pub fn uniform(net: &SisoNetwork, level: f64) -> Self {
        let t = net.bands();
        Self {
            links: net.links(),
            bands: t,
            values: vec![level / t as f64; net.links() * t],
        }
    }

    /// The default start, half the budget per link.
    pub fn half_power(net: &SisoNetwork) -> Self {
        Self::uniform(net, 0.5 * net.p_max())
    }

    pub fn links(&self) -> usize {
        self.links
    }

    pub fn bands(&self) -> usize {
        self.bands
    }

    pub fn get(&self, link: usize, band: usize) -> f64 {
        self.values[link * self.bands + band]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.values
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            links: self.links,
            bands: self.bands,
            values: self.values.iter().map(|v| v * s).collect(),
        }
    }

    pub fn link_total(&self, link: usize) -> f64 {
        self.values[link * self.bands..(link + 1) * self.bands].iter().sum()
    }

    /// Feasibility with absolute slack `tol * p_max`.
    pub fn is_feasible(&self, net: &SisoNetwork, tol: f64) -> bool {
        self.links == net.links()
            && self.bands == net.bands()
            && self.values.iter().all(|v| *v >= -tol * net.p_max())
            && (0..self.links).all(|i| self.link_total(i) <= net.p_max() * (1.0 + tol))
    }

    pub(crate) fn check(&self, net: &SisoNetwork) -> Result<()> {
        if self.links != net.links() || self.bands != net.bands() {
            return Err(FpError::Dimension {
                context: "power vector vs network",
                expected: net.links() * net.bands(),
                got: self.links * self.bands,
            });
        }
        if !self.is_feasible(net, 1e-9) {
            return Err(FpError::Infeasible(format!("powers {:?} violate the budget {}", self.values, net.p_max())));
        }
        Ok(())
    }
}

fn band_sinr(g: &DMatrix<f64>, noise: f64, p: &[f64], stride: usize, band: usize, i: usize) -> f64 {
    let n = g.nrows();
    let interference: f64 = (0..n).filter(|&j| j != i).map(|j| g[(i, j)] * p[j * stride + band]).sum();
    g[(i, i)] * p[i * stride + band] / (interference + noise)
}

/// SINR per link for single-band networks; per (link, band), link-major, otherwise.
pub fn sinr(p: &PowerVector, net: &SisoNetwork) -> Vec<f64> {
    let t = net.bands();
    (0..net.links())
        .flat_map(|i| (0..t).map(move |b| (i, b)))
        .map(|(i, b)| band_sinr(&net.gains[b], net.noise, &p.values, t, b, i))
        .collect()
}

/// `R_i = (1/T) sum_t ln(1 + SINR_i^t)` in nats.
pub fn link_rates(p: &PowerVector, net: &SisoNetwork) -> Vec<f64> {
    let t = net.bands();
    let s = sinr(p, net);
    s.chunks(t).map(|c| c.iter().map(|v| v.ln_1p()).sum::<f64>() / t as f64).collect()
}

/// `sum_i w_i R_i` in nats.
pub fn weighted_sum_rate(p: &PowerVector, net: &SisoNetwork) -> f64 {
    link_rates(p, net).iter().zip(&net.weights).map(|(r, w)| w * r).sum()
}

/// Gradient of `sum_i c_i R_i` with respect to the powers, `c = rate_weight`.
pub(crate) fn rate_gradient(p: &PowerVector, net: &SisoNetwork, rate_weight: &[f64]) -> Vec<f64> {
    let (n, t) = (net.links(), net.bands());
    let mut grad = vec![0.0; n * t];
    for b in 0..t {
        let g = &net.gains[b];
        let total: Vec<f64> = (0..n)
            .map(|k| (0..n).map(|j| g[(k, j)] * p.values[j * t + b]).sum::<f64>() + net.noise)
            .collect();
        let interference: Vec<f64> = (0..n).map(|k| total[k] - g[(k, k)] * p.values[k * t + b]).collect();
        for i in 0..n {
            let mut d = rate_weight[i] * g[(i, i)] / total[i];
            for k in (0..n).filter(|&k| k != i) {
                d -= rate_weight[k] * g[(k, i)] * (1.0 / interference[k] - 1.0 / total[k]);
            }
            grad[i * t + b] = d / t as f64;
        }
    }
    grad
}

/// Projected-gradient residual of the weighted sum rate at `p`, in units of
/// `p_max` so that it does not depend on the power scale. Zero exactly at
/// stationary points of the power control problem.
pub fn foc_residual(p: &PowerVector, net: &SisoNetwork) -> f64 {
    let g: Vec<f64> = rate_gradient(p, net, &net.weights).iter().map(|v| v * net.p_max).collect();
    let x: Vec<f64> = p.values.iter().map(|v| v / net.p_max).collect();
    let set = unit_feasible_set(net.links(), net.bands());
    projected_residual(&x, &g, &|z: &mut [f64]| set.project(z))
}

/// Feasible set of powers in units of `p_max`: the unit box for one band,
/// per-link capped simplices otherwise.
pub(crate) fn unit_feasible_set(links: usize, bands: usize) -> FeasibleSet {
    let n = links * bands;
    if bands == 1 {
        FeasibleSet::boxed(vec![0.0; n], vec![1.0; n])
    } else {
        FeasibleSet::simplex_sums(n, (0..links).map(|i| i * bands..(i + 1) * bands).collect(), vec![1.0; links])
    }
    .expect("unit power set is well formed")
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn two_cell(cross: f64) -> SisoNetwork {
        SisoNetwork::new(DMatrix::from_row_slice(2, 2, &[1.0, cross, cross, 1.0]), vec![1.0, 1.0], 1.0, 1.0).unwrap()
    }

    #[test]
    fn sinr_examples() {
        let net = two_cell(0.25);
        assert_eq!(sinr(&PowerVector::from_vec(vec![1.0, 1.0]), &net), vec![0.8, 0.8]);
        assert_eq!(sinr(&PowerVector::from_vec(vec![1.0, 0.0]), &net), vec![1.0, 0.0]);
        let single = SisoNetwork::new(DMatrix::from_element(1, 1, 1.0), vec![1.0], 1.0, 1.0).unwrap();
        assert_eq!(sinr(&PowerVector::from_vec(vec![1.0]), &single), vec![1.0]);
    }

    #[test]
    fn rate_examples() {
        let single = SisoNetwork::new(DMatrix::from_element(1, 1, 1.0), vec![1.0], 1.0, 1.0).unwrap();
        assert!((weighted_sum_rate(&PowerVector::from_vec(vec![1.0]), &single) - 2f64.ln()).abs() < 1e-15);
        let net = two_cell(0.25);
        assert!((weighted_sum_rate(&PowerVector::from_vec(vec![1.0, 1.0]), &net) - 2.0 * 1.8f64.ln()).abs() < 1e-12);
        assert_eq!(weighted_sum_rate(&PowerVector::from_vec(vec![0.0, 0.0]), &net), 0.0);
    }

    #[test]
    fn invalid_networks() {
        let g = DMatrix::from_row_slice(2, 2, &[1.0, 0.1, 0.1, 0.0]);
        assert!(SisoNetwork::new(g, vec![1.0, 1.0], 1.0, 1.0).is_err());
        let g = DMatrix::from_row_slice(2, 2, &[1.0, -0.1, 0.1, 1.0]);
        assert!(SisoNetwork::new(g.clone(), vec![1.0, 1.0], 1.0, 1.0).is_err());
        let g = DMatrix::identity(2, 2);
        assert!(SisoNetwork::new(g.clone(), vec![1.0, 1.0], 0.0, 1.0).is_err());
        assert!(matches!(SisoNetwork::new(g, vec![1.0], 1.0, 1.0), Err(FpError::Dimension { .. })));
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let g = DMatrix::from_row_slice(3, 3, &[1.0, 0.3, 0.2, 0.5, 2.0, 0.1, 0.4, 0.6, 1.5]);
        let net = SisoNetwork::new(g, vec![1.0, 0.5, 2.0], 0.1, 1.0).unwrap();
        let p = PowerVector::from_vec(vec![0.3, 0.7, 0.5]);
        let grad = rate_gradient(&p, &net, net.weights());
        for i in 0..3 {
            let h = 1e-6;
            let mut up = p.clone();
            up.values[i] += h;
            let mut dn = p.clone();
            dn.values[i] -= h;
            let fd = (weighted_sum_rate(&up, &net) - weighted_sum_rate(&dn, &net)) / (2.0 * h);
            assert!((fd - grad[i]).abs() <= 1e-6 * grad[i].abs().max(1.0));
        }
    }

    #[test]
    fn foc_residual_examples() {
        let single = SisoNetwork::new(DMatrix::from_element(1, 1, 1.0), vec![1.0], 1.0, 2.0).unwrap();
        assert_eq!(foc_residual(&PowerVector::from_vec(vec![2.0]), &single), 0.0);
        assert!(foc_residual(&PowerVector::from_vec(vec![0.5]), &single) > 0.0);
        // Symmetric interior stationary point: p1 = p2 with zero derivative.
        let net = two_cell(1.0);
        assert!(foc_residual(&PowerVector::from_vec(vec![0.3, 0.9]), &net) > 0.0);
    }

    #[test]
    fn normalization_preserves_rates() {
        let g = DMatrix::from_row_slice(2, 2, &[1e-9, 3e-11, 2e-11, 5e-10]);
        let net = SisoNetwork::new(g, vec![1.0, 1.0], 1e-13, 20.0).unwrap();
        let p = PowerVector::from_vec(vec![3.0, 17.0]);
        let a = weighted_sum_rate(&p, &net);
        let b = weighted_sum_rate(&p.scaled(1.0 / 20.0), &net.normalized());
        assert!((a - b).abs() <= 1e-12 * a);
    }
}

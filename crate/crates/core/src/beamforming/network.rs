use num_complex::Complex64;

use crate::error::{FpError, Result};
use crate::fp::FeasibleSet;
use crate::numerics::linalg::{add_outer, dominant_right_singular, hpd_solve, norm_sqr, pack, re_inner, unpack, CMat, CVec};
use crate::numerics::RngStream;

/// Downlink MIMO network with `streams` data streams per cell.
///
/// Streams are indexed `k = i * streams + m` for stream `m` of cell `i`.
/// `channel(k, j)` is the `N x M` channel from BS `j` to the user of stream `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct MimoNetwork {
    cells: usize,
    streams: usize,
    tx: usize,
    rx: usize,
    channels: Vec<Vec<CMat>>,
    weights: Vec<f64>,
    noise: f64,
    p_max: f64,
}

impl MimoNetwork {
    /// `channels[k][j]` for every stream `k` and BS `j`.
    pub fn new(
        cells: usize,
        streams: usize,
        channels: Vec<Vec<CMat>>,
        weights: Vec<f64>,
        noise: f64,
        p_max: f64,
    ) -> Result<Self> {
        if cells == 0 || streams == 0 {
            return Err(FpError::domain("MimoNetwork", "needs at least one cell and one stream"));
        }
        let k = cells * streams;
        if channels.len() != k {
            return Err(FpError::Dimension {
                context: "MimoNetwork channels (streams)",
                expected: k,
                got: channels.len(),
            });
        }
        if weights.len() != k {
            return Err(FpError::Dimension {
                context: "MimoNetwork weights",
                expected: k,
                got: weights.len(),
            });
        }
        let (rx, tx) = channels[0].first().map(|h| (h.nrows(), h.ncols())).unwrap_or((0, 0));
        if rx == 0 || tx == 0 {
            return Err(FpError::domain("MimoNetwork", "channel matrices must be nonempty"));
        }
        if streams > tx {
            return Err(FpError::domain("MimoNetwork", format!("{streams} streams exceed {tx} BS antennas")));
        }
        for row in &channels {
            if row.len() != cells {
                return Err(FpError::Dimension {
                    context: "MimoNetwork channels (cells)",
                    expected: cells,
                    got: row.len(),
                });
            }
            for h in row {
                if h.nrows() != rx || h.ncols() != tx {
                    return Err(FpError::Dimension {
                        context: "MimoNetwork channel shape",
                        expected: rx * tx,
                        got: h.nrows() * h.ncols(),
                    });
                }
                if h.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                    return Err(FpError::domain("MimoNetwork", "channel entries must be finite"));
                }
            }
        }
        if weights.iter().any(|w| !(*w >= 0.0) || !w.is_finite()) {
            return Err(FpError::domain("MimoNetwork", "weights must be nonnegative"));
        }
        if !(noise > 0.0) || !noise.is_finite() {
            return Err(FpError::domain("MimoNetwork", format!("noise must be positive, got {noise}")));
        }
        if !(p_max > 0.0) || !p_max.is_finite() {
            return Err(FpError::domain("MimoNetwork", format!("p_max must be positive, got {p_max}")));
        }
        Ok(Self {
            cells,
            streams,
            tx,
            rx,
            channels,
            weights,
            noise,
            p_max,
        })
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn streams_per_cell(&self) -> usize {
        self.streams
    }

    pub fn stream_count(&self) -> usize {
        self.cells * self.streams
    }

    pub fn tx_antennas(&self) -> usize {
        self.tx
    }

    pub fn rx_antennas(&self) -> usize {
        self.rx
    }

    pub fn channel(&self, stream: usize, bs: usize) -> &CMat {
        &self.channels[stream][bs]
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

    /// Serving BS of stream `k`.
    pub fn bs_of(&self, k: usize) -> usize {
        k / self.streams
    }

    /// Channels scaled by `sqrt(p_max) / sigma`, unit noise and unit budget.
    /// Rates are unchanged under `v -> v / sqrt(p_max)`.
    pub(crate) fn normalized(&self) -> Self {
        let s = Complex64::new((self.p_max / self.noise).sqrt(), 0.0);
        Self {
            channels: self.channels.iter().map(|row| row.iter().map(|h| h * s).collect()).collect(),
            noise: 1.0,
            p_max: 1.0,
            ..self.clone()
        }
    }

    /// Per-BS ball constraint on packed beamformers, radius `sqrt(p_max)`.
    pub(crate) fn feasible_set(&self) -> FeasibleSet {
        let per_bs = 2 * self.tx * self.streams;
        FeasibleSet::group_balls(
            per_bs * self.cells,
            (0..self.cells).map(|i| i * per_bs..(i + 1) * per_bs).collect(),
            vec![self.p_max.sqrt(); self.cells],
        )
        .expect("ball set is well formed")
    }
}

/// Transmit beamformers `v_k in C^M`, one per stream.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamformerSet {
    pub vectors: Vec<CVec>,
}

impl BeamformerSet {
    pub fn zeros(net: &MimoNetwork) -> Self {
        Self {
            vectors: vec![CVec::zeros(net.tx); net.stream_count()],
        }
    }

    /// Equal power split over the streams of each BS, each along the dominant
    /// right singular direction of its own channel.
    pub fn dominant(net: &MimoNetwork) -> Self {
        let scale = Complex64::new((net.p_max / net.streams as f64).sqrt(), 0.0);
        Self {
            vectors: (0..net.stream_count())
                .map(|k| dominant_right_singular(net.channel(k, net.bs_of(k))) * scale)
                .collect(),
        }
    }

    /// Isotropic random directions with a random per-BS power in `[0, p_max]`.
    pub fn random(net: &MimoNetwork, rng: &mut RngStream) -> Self {
        let mut vectors: Vec<CVec> = (0..net.stream_count())
            .map(|_| CVec::from_fn(net.tx, |_, _| rng.complex_gaussian()))
            .collect();
        for i in 0..net.cells {
            let streams = i * net.streams..(i + 1) * net.streams;
            let total: f64 = vectors[streams.clone()].iter().map(norm_sqr).sum();
            let target = rng.uniform_in(0.0, net.p_max);
            let s = Complex64::new((target / total).sqrt(), 0.0);
            for v in &mut vectors[streams] {
                *v *= s;
            }
        }
        Self { vectors }
    }

    pub fn bs_power(&self, net: &MimoNetwork, bs: usize) -> f64 {
        self.vectors[bs * net.streams..(bs + 1) * net.streams].iter().map(norm_sqr).sum()
    }

    pub fn is_feasible(&self, net: &MimoNetwork, tol: f64) -> bool {
        self.vectors.len() == net.stream_count()
            && self.vectors.iter().all(|v| v.len() == net.tx)
            && (0..net.cells).all(|i| self.bs_power(net, i) <= net.p_max * (1.0 + tol))
    }

    pub(crate) fn check(&self, net: &MimoNetwork) -> Result<()> {
        if self.vectors.len() != net.stream_count() || self.vectors.iter().any(|v| v.len() != net.tx) {
            return Err(FpError::Dimension {
                context: "beamformers vs network",
                expected: net.stream_count() * net.tx,
                got: self.vectors.iter().map(|v| v.len()).sum(),
            });
        }
        if !self.is_feasible(net, 1e-9) {
            return Err(FpError::Infeasible("beamformers violate a per-BS power budget".into()));
        }
        Ok(())
    }

    pub fn scaled(&self, s: f64) -> Self {
        let s = Complex64::new(s, 0.0);
        Self {
            vectors: self.vectors.iter().map(|v| v * s).collect(),
        }
    }

    pub(crate) fn pack(&self) -> Vec<f64> {
        pack(&self.vectors)
    }

    pub(crate) fn unpack(x: &[f64], net: &MimoNetwork) -> Self {
        Self {
            vectors: unpack(x, &vec![net.tx; net.stream_count()]),
        }
    }
}

/// `sigma^2 I + sum_l H_{k,b(l)} v_l v_l^H H_{k,b(l)}^H` over all streams `l`,
/// leaving out `k` itself when `exclude_own` is set.
pub(crate) fn covariance(net: &MimoNetwork, v: &[CVec], k: usize, exclude_own: bool) -> CMat {
    let mut c = CMat::identity(net.rx, net.rx) * Complex64::new(net.noise, 0.0);
    for (l, vl) in v.iter().enumerate() {
        if exclude_own && l == k {
            continue;
        }
        let u = net.channel(k, net.bs_of(l)) * vl;
        add_outer(&mut c, &u, 1.0);
    }
    c
}

/// SINR of every stream: `v^H H^H C^{-1} H v` with the interference-plus-noise covariance `C`.
pub fn stream_sinr(v: &BeamformerSet, net: &MimoNetwork) -> Result<Vec<f64>> {
    (0..net.stream_count())
        .map(|k| {
            let a = net.channel(k, net.bs_of(k)) * &v.vectors[k];
            let c = covariance(net, &v.vectors, k, true);
            Ok(re_inner(&a, &hpd_solve(&c, &a)?).max(0.0))
        })
        .collect()
}

/// Rate `ln(1 + SINR)` of every stream, in nats, indexed like the streams.
pub fn stream_rate(v: &BeamformerSet, net: &MimoNetwork) -> Result<Vec<f64>> {
    Ok(stream_sinr(v, net)?.into_iter().map(f64::ln_1p).collect())
}

pub fn bf_weighted_sum_rate(v: &BeamformerSet, net: &MimoNetwork) -> Result<f64> {
    Ok(stream_rate(v, net)?.iter().zip(&net.weights).map(|(r, w)| w * r).sum())
}

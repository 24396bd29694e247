//! Scenario generators for the hexagonal cellular and energy-efficiency
//! experiments.

use nalgebra::DMatrix;
use num_complex::Complex64;
use sha2::{Digest, Sha256};

use crate::beamforming::MimoNetwork;
use crate::energy::{BroadcastNetwork, SingleLink};
use crate::error::Result;
use crate::netsim::config::ScenarioConfig;
use crate::netsim::layout::{pathloss_db, HexLayout};
use crate::netsim::units::{db_to_linear, dbm_to_watts};
use crate::numerics::{CMat, RngStream};
use crate::power::SisoNetwork;

/// Linear power gain from every BS to every user, `[cell][user][bs]`.
///
/// Users are placed first, cell by cell, then one shadowing draw is taken per
/// (user, BS) pair in the same order.
fn large_scale_gains(cfg: &ScenarioConfig, rng: &mut RngStream) -> Result<Vec<Vec<Vec<f64>>>> {
    let layout = HexLayout::new(cfg.isd_km)?;
    let users: Vec<Vec<(f64, f64)>> = (0..cfg.cells)
        .map(|i| (0..cfg.users_per_cell).map(|_| layout.sample_user(i, rng)).collect())
        .collect();
    users
        .iter()
        .map(|cell| {
            cell.iter()
                .map(|&u| {
                    (0..cfg.cells)
                        .map(|j| {
                            let shadow = rng.normal(0.0, cfg.shadowing_db_std);
                            Ok(db_to_linear(-pathloss_db(layout.distance(j, u), shadow)?))
                        })
                        .collect()
                })
                .collect()
        })
        .collect()
}

/// Single-antenna hexagonal network.
///
/// With one band each cell serves its first user. With `T > 1` bands, tone `t`
/// of cell `i` goes to user `t mod U` and every tone carries an independent
/// unit-mean exponential fading factor on top of pathloss and shadowing.
pub fn generate_siso_hex(cfg: &ScenarioConfig, rng: &mut RngStream) -> Result<SisoNetwork> {
    let large = large_scale_gains(cfg, rng)?;
    let c = cfg.cells;
    let mut gains = Vec::with_capacity(cfg.bands);
    for t in 0..cfg.bands {
        let u = t % cfg.users_per_cell;
        let mut g = DMatrix::zeros(c, c);
        // Row-major draw order keeps the stream layout independent of nalgebra's storage.
        for i in 0..c {
            for j in 0..c {
                let fading = if cfg.bands > 1 { rng.complex_gaussian().norm_sqr() } else { 1.0 };
                g[(i, j)] = large[i][u][j] * fading;
            }
        }
        gains.push(g);
    }
    SisoNetwork::multiband(gains, vec![1.0; c], dbm_to_watts(cfg.noise_dbm), dbm_to_watts(cfg.p_max_dbm))
}

fn rayleigh(rows: usize, cols: usize, gain: f64, rng: &mut RngStream) -> CMat {
    let amp = Complex64::new(gain.sqrt(), 0.0);
    CMat::from_fn(rows, cols, |_, _| rng.complex_gaussian() * amp)
}

/// Multi-antenna hexagonal network: one stream per user, `N x M` channels with
/// i.i.d. CN(0, 1) entries scaled by the pathloss amplitude.
pub fn generate_mimo_hex(cfg: &ScenarioConfig, rng: &mut RngStream) -> Result<MimoNetwork> {
    let large = large_scale_gains(cfg, rng)?;
    let (n, m) = (cfg.user_antennas, cfg.bs_antennas);
    let channels: Vec<Vec<CMat>> = large
        .iter()
        .flat_map(|cell| cell.iter())
        .map(|user| user.iter().map(|&g| rayleigh(n, m, g, rng)).collect())
        .collect();
    let k = channels.len();
    MimoNetwork::new(
        cfg.cells,
        cfg.users_per_cell,
        channels,
        vec![1.0; k],
        dbm_to_watts(cfg.noise_dbm),
        dbm_to_watts(cfg.p_max_dbm),
    )
}

/// Isolated link with the fixed pathloss, no fading.
pub fn generate_ee_single(cfg: &ScenarioConfig) -> Result<SingleLink> {
    SingleLink::new(
        db_to_linear(-cfg.pathloss_db),
        dbm_to_watts(cfg.noise_dbm),
        dbm_to_watts(cfg.p_max_dbm),
        dbm_to_watts(cfg.p_on_dbm),
    )
}

/// One sender, `users_per_cell` receivers, Rayleigh fading over the fixed pathloss.
pub fn generate_ee_broadcast(cfg: &ScenarioConfig, rng: &mut RngStream) -> Result<BroadcastNetwork> {
    let gain = db_to_linear(-cfg.pathloss_db);
    let channels = (0..cfg.users_per_cell)
        .map(|_| rayleigh(cfg.user_antennas, cfg.bs_antennas, gain, rng))
        .collect();
    BroadcastNetwork::new(
        channels,
        dbm_to_watts(cfg.noise_dbm),
        dbm_to_watts(cfg.p_max_dbm),
        dbm_to_watts(cfg.p_on_dbm),
    )
}

/// Hex digest of a sequence of reals, by their little-endian bytes.
pub fn hash_reals(values: impl IntoIterator<Item = f64>) -> String {
    let mut h = Sha256::new();
    for v in values {
        h.update(v.to_le_bytes());
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

pub fn siso_hash(net: &SisoNetwork) -> String {
    let gains = (0..net.bands()).flat_map(|t| net.gains(t).iter().copied().collect::<Vec<_>>());
    hash_reals(gains.chain(net.weights().iter().copied()).chain([net.noise(), net.p_max()]))
}

pub fn mimo_hash(net: &MimoNetwork) -> String {
    let k = net.stream_count();
    let mut vals = Vec::new();
    for s in 0..k {
        for j in 0..net.cells() {
            vals.extend(net.channel(s, j).iter().flat_map(|z| [z.re, z.im]));
        }
    }
    vals.extend(net.weights());
    vals.extend([net.noise(), net.p_max()]);
    hash_reals(vals)
}

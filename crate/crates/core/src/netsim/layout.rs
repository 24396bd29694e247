//! Seven-site hexagonal layout with wrap-around.
//!
//! Site 0 sits at the origin and sites 1..=6 around it at one inter-site
//! distance. The torus is generated by the six translations of length
//! `sqrt(7) * isd`; a link's distance is the shortest over the seven images
//! of the transmitter.

use std::f64::consts::PI;

use crate::error::{FpError, Result};
use crate::numerics::RngStream;

pub const SITES: usize = 7;

/// BS-to-user distances are floored here, in km.
pub const MIN_DISTANCE_KM: f64 = 0.01;

/// `128.1 + 37.6 log10(d) + shadow`, in dB, `d` in km.
pub fn pathloss_db(d_km: f64, shadow_db: f64) -> Result<f64> {
    if !(d_km > 0.0) || !d_km.is_finite() {
        return Err(FpError::domain("pathloss_db", format!("distance must be positive, got {d_km}")));
    }
    Ok(128.1 + 37.6 * d_km.log10() + shadow_db)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HexLayout {
    isd_km: f64,
}

fn rotate((x, y): (f64, f64), angle: f64) -> (f64, f64) {
    let (s, c) = angle.sin_cos();
    (c * x - s * y, s * x + c * y)
}

impl HexLayout {
    pub fn new(isd_km: f64) -> Result<Self> {
        if !(isd_km > 0.0) || !isd_km.is_finite() {
            return Err(FpError::config("channel.isd_km", format!("must be positive, got {isd_km}")));
        }
        Ok(Self { isd_km })
    }

    pub fn isd_km(&self) -> f64 {
        self.isd_km
    }

    pub fn site(&self, k: usize) -> (f64, f64) {
        assert!(k < SITES, "site index {k} out of range");
        if k == 0 {
            (0.0, 0.0)
        } else {
            rotate((self.isd_km, 0.0), (k - 1) as f64 * PI / 3.0)
        }
    }

    /// Torus translations, the identity first.
    fn images(&self) -> [(f64, f64); SITES] {
        let base = (2.5 * self.isd_km, 0.5 * 3f64.sqrt() * self.isd_km);
        let mut out = [(0.0, 0.0); SITES];
        for (k, slot) in out.iter_mut().enumerate().skip(1) {
            *slot = rotate(base, (k - 1) as f64 * PI / 3.0);
        }
        out
    }

    /// Wrap-around distance from site `k` to `point`, floored at [`MIN_DISTANCE_KM`].
    pub fn distance(&self, k: usize, point: (f64, f64)) -> f64 {
        let (sx, sy) = self.site(k);
        self.images()
            .iter()
            .map(|(tx, ty)| ((point.0 - sx - tx).powi(2) + (point.1 - sy - ty).powi(2)).sqrt())
            .fold(f64::INFINITY, f64::min)
            .max(MIN_DISTANCE_KM)
    }

    /// Whether `offset` from a site center lies in that site's hexagon.
    pub fn in_hexagon(&self, offset: (f64, f64)) -> bool {
        (0..3).all(|k| {
            let (nx, ny) = rotate((1.0, 0.0), k as f64 * PI / 3.0);
            (offset.0 * nx + offset.1 * ny).abs() <= 0.5 * self.isd_km
        })
    }

    /// Uniform point in the hexagon of site `k`, by rejection from the bounding box.
    pub fn sample_user(&self, k: usize, rng: &mut RngStream) -> (f64, f64) {
        let half_w = 0.5 * self.isd_km;
        let half_h = self.isd_km / 3f64.sqrt();
        loop {
            let off = (rng.uniform_in(-half_w, half_w), rng.uniform_in(-half_h, half_h));
            if self.in_hexagon(off) {
                let (sx, sy) = self.site(k);
                return (sx + off.0, sy + off.1);
            }
        }
    }
}

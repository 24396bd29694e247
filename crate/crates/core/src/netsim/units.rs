//! dB and dBm conversions. All solver arithmetic is in linear watts.

use std::f64::consts::LN_2;

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

pub fn watts_to_dbm(w: f64) -> f64 {
    10.0 * w.log10() + 30.0
}

/// Power ratio from decibels.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// Nats per channel use to megabits per second over `bandwidth_hz`.
pub fn nats_to_mbps(nats: f64, bandwidth_hz: f64) -> f64 {
    nats / LN_2 * bandwidth_hz * 1e-6
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert!((dbm_to_watts(21.0) - 0.125_892_541_179_416_7).abs() < 1e-15);
        assert!((dbm_to_watts(43.0) - 19.952_623_149_688_8).abs() < 1e-12);
        assert!((dbm_to_watts(-100.0) - 1e-13).abs() < 1e-27);
        assert!((db_to_linear(-120.0) / dbm_to_watts(-100.0) - 10.0).abs() < 1e-12);
        assert!((nats_to_mbps(LN_2, 1e6) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn round_trips() {
        for k in -200..=60 {
            let v = k as f64 * 0.73;
            assert!((watts_to_dbm(dbm_to_watts(v)) - v).abs() <= 1e-12 * v.abs().max(1.0));
            assert!((linear_to_db(db_to_linear(v)) - v).abs() <= 1e-12 * v.abs().max(1.0));
        }
    }
}

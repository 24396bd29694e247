//! Experiment configuration: published scenario defaults per kind, overridden by a
//! TOML file whose keys are flattened to dotted paths.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{FpError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    SisoHex,
    MimoHex,
    EeSingle,
    EeBroadcast,
    Textbook,
}

impl ScenarioKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::SisoHex => "siso_hex",
            Self::MimoHex => "mimo_hex",
            Self::EeSingle => "ee_single",
            Self::EeBroadcast => "ee_broadcast",
            Self::Textbook => "textbook",
        }
    }

    /// Kinds whose instance is drawn at random and so need a seed.
    pub fn is_random(self) -> bool {
        matches!(self, Self::SisoHex | Self::MimoHex | Self::EeBroadcast)
    }
}

impl FromStr for ScenarioKind {
    type Err = FpError;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "siso_hex" => Self::SisoHex,
            "mimo_hex" => Self::MimoHex,
            "ee_single" => Self::EeSingle,
            "ee_broadcast" => Self::EeBroadcast,
            "textbook" => Self::Textbook,
            _ => return Err(FpError::config("scenario.kind", format!("unknown kind `{s}`"))),
        })
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Direct,
    Closed,
    FixedPoint,
    Dinkelbach,
    Nested,
    MaxMin,
    Utility,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Self::Direct => "direct",
            Self::Closed => "closed",
            Self::FixedPoint => "fixed-point",
            Self::Dinkelbach => "dinkelbach",
            Self::Nested => "nested",
            Self::MaxMin => "maxmin",
            Self::Utility => "utility",
        }
    }
}

impl FromStr for Algorithm {
    type Err = FpError;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "direct" => Self::Direct,
            "closed" => Self::Closed,
            "fixed-point" => Self::FixedPoint,
            "dinkelbach" => Self::Dinkelbach,
            "nested" => Self::Nested,
            "maxmin" | "max-min" => Self::MaxMin,
            "utility" => Self::Utility,
            _ => return Err(FpError::config("solver.algo", format!("unknown algorithm `{s}`"))),
        })
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioConfig {
    pub kind: ScenarioKind,
    pub cells: usize,
    pub users_per_cell: usize,
    /// Transmit antennas `M`.
    pub bs_antennas: usize,
    /// Receive antennas `N`.
    pub user_antennas: usize,
    pub bands: usize,
    pub bandwidth_hz: f64,
    pub p_max_dbm: f64,
    pub noise_dbm: f64,
    pub p_on_dbm: f64,
    pub isd_km: f64,
    pub shadowing_db_std: f64,
    /// Fixed pathloss of the energy-efficiency scenarios, in dB.
    pub pathloss_db: f64,
    pub seed: Option<u64>,
    pub algorithm: Algorithm,
    pub tol: f64,
    pub max_iters: usize,
    /// Random restarts for power control; 1 runs once from half power.
    pub starts: usize,
}

const KEYS: &[&str] = &[
    "scenario.kind",
    "scenario.cells",
    "scenario.users_per_cell",
    "scenario.bands",
    "scenario.seed",
    "antennas.bs",
    "antennas.user",
    "channel.bandwidth_hz",
    "channel.p_max_dbm",
    "channel.noise_dbm",
    "channel.p_on_dbm",
    "channel.isd_km",
    "channel.shadowing_db_std",
    "channel.pathloss_db",
    "solver.algo",
    "solver.tol",
    "solver.max_iters",
    "solver.starts",
];

impl ScenarioConfig {
    /// Scenario constants of the corresponding experiment.
    pub fn defaults(kind: ScenarioKind) -> Self {
        let base = Self {
            kind,
            cells: 7,
            users_per_cell: 1,
            bs_antennas: 1,
            user_antennas: 1,
            bands: 1,
            bandwidth_hz: 10e6,
            p_max_dbm: 43.0,
            noise_dbm: -100.0,
            p_on_dbm: 5.0,
            isd_km: 0.8,
            shadowing_db_std: 8.0,
            pathloss_db: 120.0,
            seed: None,
            algorithm: Algorithm::Closed,
            tol: 1e-6,
            // The closed-form updates creep toward full power at high SNR;
            // this is a cap, not a budget.
            max_iters: 1_000_000,
            starts: 1,
        };
        match kind {
            ScenarioKind::SisoHex | ScenarioKind::Textbook => base,
            ScenarioKind::MimoHex => Self {
                max_iters: 2_000,
                users_per_cell: 2,
                bs_antennas: 2,
                user_antennas: 2,
                ..base
            },
            ScenarioKind::EeSingle => Self {
                cells: 1,
                users_per_cell: 1,
                bandwidth_hz: 1e6,
                p_max_dbm: 21.0,
                algorithm: Algorithm::Direct,
                tol: 1e-10,
                max_iters: 100,
                ..base
            },
            ScenarioKind::EeBroadcast => Self {
                max_iters: 20_000,
                cells: 1,
                users_per_cell: 3,
                bs_antennas: 3,
                user_antennas: 2,
                bandwidth_hz: 1e6,
                p_max_dbm: 21.0,
                algorithm: Algorithm::Nested,
                ..base
            },
        }
    }

    /// Defaults for `kind`, overridden by the TOML document `text`.
    ///
    /// A `scenario.kind` entry in the document must agree with `kind`.
    pub fn from_toml(kind: ScenarioKind, text: &str) -> Result<Self> {
        let mut cfg = Self::defaults(kind);
        cfg.apply_toml(text)?;
        Ok(cfg)
    }

    pub fn apply_toml(&mut self, text: &str) -> Result<()> {
        let table: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| FpError::config("<file>", e.message().to_string()))?;
        let mut flat = BTreeMap::new();
        flatten("", &toml::Value::Table(table), &mut flat);
        for (key, value) in &flat {
            self.set(key, value)?;
        }
        Ok(())
    }

    /// Sets one dotted key. Unknown keys are errors.
    pub fn set(&mut self, key: &str, value: &toml::Value) -> Result<()> {
        if !KEYS.contains(&key) {
            return Err(FpError::config(key, "unknown key"));
        }
        match key {
            "scenario.kind" => {
                let kind: ScenarioKind = as_str(key, value)?.parse()?;
                if kind != self.kind {
                    return Err(FpError::config(key, format!("`{kind}` conflicts with the `{}` subcommand", self.kind)));
                }
            }
            "scenario.cells" => self.cells = as_count(key, value)?,
            "scenario.users_per_cell" => self.users_per_cell = as_count(key, value)?,
            "scenario.bands" => self.bands = as_count(key, value)?,
            "scenario.seed" => {
                let s = value.as_integer().ok_or_else(|| FpError::config(key, "expected an integer"))?;
                self.seed = Some(u64::try_from(s).map_err(|_| FpError::config(key, "must be nonnegative"))?);
            }
            "antennas.bs" => self.bs_antennas = as_count(key, value)?,
            "antennas.user" => self.user_antennas = as_count(key, value)?,
            "channel.bandwidth_hz" => self.bandwidth_hz = as_real(key, value)?,
            "channel.p_max_dbm" => self.p_max_dbm = as_real(key, value)?,
            "channel.noise_dbm" => self.noise_dbm = as_real(key, value)?,
            "channel.p_on_dbm" => self.p_on_dbm = as_real(key, value)?,
            "channel.isd_km" => self.isd_km = as_real(key, value)?,
            "channel.shadowing_db_std" => self.shadowing_db_std = as_real(key, value)?,
            "channel.pathloss_db" => self.pathloss_db = as_real(key, value)?,
            "solver.algo" => self.algorithm = as_str(key, value)?.parse()?,
            "solver.tol" => self.tol = as_real(key, value)?,
            "solver.max_iters" => self.max_iters = as_count(key, value)?,
            "solver.starts" => self.starts = as_count(key, value)?,
            _ => unreachable!("key list and match arms agree"),
        }
        Ok(())
    }

    /// Field-level checks; run after all overrides are applied.
    pub fn validate(&self) -> Result<()> {
        let positive = |field: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(FpError::config(field, format!("must be positive and finite, got {v}")))
            }
        };
        let finite = |field: &str, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(FpError::config(field, format!("must be finite, got {v}")))
            }
        };
        positive("channel.bandwidth_hz", self.bandwidth_hz)?;
        positive("channel.isd_km", self.isd_km)?;
        positive("solver.tol", self.tol)?;
        finite("channel.p_max_dbm", self.p_max_dbm)?;
        finite("channel.noise_dbm", self.noise_dbm)?;
        finite("channel.p_on_dbm", self.p_on_dbm)?;
        finite("channel.pathloss_db", self.pathloss_db)?;
        if !(self.shadowing_db_std >= 0.0) || !self.shadowing_db_std.is_finite() {
            return Err(FpError::config("channel.shadowing_db_std", format!("must be nonnegative, got {}", self.shadowing_db_std)));
        }
        if self.kind.is_random() && self.seed.is_none() {
            return Err(FpError::config("scenario.seed", format!("required for `{}`", self.kind)));
        }
        let nonzero = |field: &str, v: usize| {
            if v > 0 {
                Ok(())
            } else {
                Err(FpError::config(field, "must be at least 1"))
            }
        };
        nonzero("solver.max_iters", self.max_iters)?;
        nonzero("solver.starts", self.starts)?;
        nonzero("scenario.users_per_cell", self.users_per_cell)?;
        nonzero("scenario.bands", self.bands)?;
        nonzero("antennas.bs", self.bs_antennas)?;
        nonzero("antennas.user", self.user_antennas)?;
        match self.kind {
            ScenarioKind::SisoHex | ScenarioKind::MimoHex => {
                if !(1..=super::layout::SITES).contains(&self.cells) {
                    return Err(FpError::config("scenario.cells", format!("must be in 1..=7, got {}", self.cells)));
                }
            }
            _ => {}
        }
        if self.kind == ScenarioKind::MimoHex && self.users_per_cell > self.bs_antennas {
            return Err(FpError::config(
                "scenario.users_per_cell",
                format!("{} users exceed {} BS antennas", self.users_per_cell, self.bs_antennas),
            ));
        }
        if self.kind == ScenarioKind::EeBroadcast && self.users_per_cell > self.bs_antennas {
            return Err(FpError::config(
                "scenario.users_per_cell",
                format!("{} receivers exceed {} transmit antennas", self.users_per_cell, self.bs_antennas),
            ));
        }
        if self.bands > 1 && self.kind != ScenarioKind::SisoHex {
            return Err(FpError::config("scenario.bands", "multiple bands are only defined for siso_hex"));
        }
        let allowed: &[Algorithm] = match self.kind {
            ScenarioKind::SisoHex if self.bands > 1 => &[Algorithm::Direct],
            ScenarioKind::SisoHex => &[
                Algorithm::Direct,
                Algorithm::Closed,
                Algorithm::FixedPoint,
                Algorithm::MaxMin,
                Algorithm::Utility,
            ],
            ScenarioKind::MimoHex => &[Algorithm::Direct, Algorithm::Closed],
            ScenarioKind::EeSingle => &[Algorithm::Direct, Algorithm::Dinkelbach],
            ScenarioKind::EeBroadcast => &[Algorithm::Nested, Algorithm::Dinkelbach],
            // Every fixture runs regardless of the algorithm.
            ScenarioKind::Textbook => return Ok(()),
        };
        if !allowed.contains(&self.algorithm) {
            let names: Vec<_> = allowed.iter().map(|a| a.name()).collect();
            return Err(FpError::config(
                "solver.algo",
                format!("`{}` is not available for `{}`; choose one of {}", self.algorithm, self.kind, names.join(", ")),
            ));
        }
        Ok(())
    }
}

fn flatten(prefix: &str, value: &toml::Value, out: &mut BTreeMap<String, toml::Value>) {
    match value {
        toml::Value::Table(t) => {
            for (k, v) in t {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, v, out);
            }
        }
        other => {
            out.insert(prefix.to_string(), other.clone());
        }
    }
}

fn as_real(key: &str, v: &toml::Value) -> Result<f64> {
    match v {
        toml::Value::Float(f) => Ok(*f),
        toml::Value::Integer(i) => Ok(*i as f64),
        _ => Err(FpError::config(key, format!("expected a number, got {v}"))),
    }
}

fn as_count(key: &str, v: &toml::Value) -> Result<usize> {
    let i = v.as_integer().ok_or_else(|| FpError::config(key, format!("expected an integer, got {v}")))?;
    usize::try_from(i).map_err(|_| FpError::config(key, format!("must be nonnegative, got {i}")))
}

fn as_str<'a>(key: &str, v: &'a toml::Value) -> Result<&'a str> {
    v.as_str().ok_or_else(|| FpError::config(key, format!("expected a string, got {v}")))
}

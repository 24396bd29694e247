//! Cellular scenarios, experiment configuration and the run driver behind the
//! `fpsim` binary.

pub mod config;
pub mod layout;
pub mod run;
pub mod scenario;
pub mod textbook;
pub mod units;

pub use config::{Algorithm, ScenarioConfig, ScenarioKind};
pub use layout::{pathloss_db, HexLayout};
pub use run::{execute, run_batch, run_experiment, write_outcome, Metric, Outcome, RunSummary};
pub use scenario::{generate_ee_broadcast, generate_ee_single, generate_mimo_hex, generate_siso_hex};

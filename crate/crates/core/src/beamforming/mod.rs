//! Weighted sum-rate beamforming for downlink MIMO networks.

pub mod closed_form;
pub mod direct;
pub mod network;

pub use closed_form::{bf_closed_form_solve, eta_power, BsDual, DualState};
pub use direct::{bf_direct_solve, BfAuxState, BfSolution};
pub use network::{bf_weighted_sum_rate, stream_rate, stream_sinr, BeamformerSet, MimoNetwork};

//! Power control for single-antenna downlink networks.

pub mod closed_form;
pub mod direct;
pub mod multistart;
pub mod network;

pub use closed_form::{pc_closed_form_solve, pc_fixed_point_solve, FixedPointResult};
pub use direct::{pc_direct_solve, pc_maxmin_solve, pc_multiband_solve, pc_utility_solve, PcAuxState, PcSolution, Utility};
pub use multistart::{best_of_starts, random_start};
pub use network::{foc_residual, link_rates, sinr, weighted_sum_rate, PowerVector, SisoNetwork};

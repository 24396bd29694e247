//! Energy-efficiency maximization.

pub mod broadcast;
pub mod single;

pub use broadcast::{ee_nested_solve, ee_objective, BroadcastNetwork, EeAuxState, EeSolution};
pub use single::{ee_objective_link, ee_single_link_dinkelbach, ee_single_link_qt, LinkSolution, SingleLink};

//! Shared numerical kernels: projections, the projected-gradient inner
//! solver, Hermitian positive-definite solves, bisection and seeded RNG.

pub mod bisection;
pub mod linalg;
pub mod pgm;
pub mod projection;
pub mod rng;

pub use bisection::bisection_root;
pub use linalg::{hpd_solve, CMat, CVec, HpdFactor};
pub use pgm::{projected_gradient_maximize, FnObjective, InnerOutcome, SmoothObjective, SolverOptions};
pub use projection::{project_box, project_capped_simplex, project_group_ball};
pub use rng::RngStream;

//! Quadratic transform, Dinkelbach's transform and the alternating solver for
//! concave-convex multi-ratio problems.

pub mod dinkelbach;
pub mod maxmin;
pub mod problem;
pub mod solve;
pub mod transform;

pub use dinkelbach::{dinkelbach_solve, DinkelbachSolution};
pub use problem::{
    AuxValue, AuxiliaryVector, Combiner, FeasibleKind, FeasibleSet, FnRatio, MatrixRatioTerm, OuterFunction,
    RatioProblem, RatioTerm, Term,
};
pub use solve::{fp_solve, fp_solve_until, fp_solve_with_residual, FpSolution, InnerSolver, ProjectedGradient, TransformedSum};
pub use transform::{qt_md_optimal_y, qt_md_value, qt_optimal_y, qt_optimal_y_affine, qt_value, QtParams};

//! Fractional programming with the quadratic transform.
//!
//! The crate provides the scalar and multidimensional quadratic transforms,
//! Dinkelbach's transform, a generic alternating solver for sum, sum-of-functions
//! and max-min ratio problems, and three applications built on them: weighted
//! sum-rate power control, MIMO beamforming and energy-efficiency maximization.
//! The [`netsim`] module generates cellular scenarios and drives experiments.

pub mod beamforming;
pub mod energy;
pub mod error;
pub mod fp;
pub mod netsim;
pub mod numerics;
pub mod par;
pub mod power;
pub mod trace;

pub use error::{FpError, Result};
pub use trace::{IterationRecord, IterationTrace};

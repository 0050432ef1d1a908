//! Simulation of the stable allocation of a Poisson process of centers with
//! random appetites, the Boolean model that dominates its claimed set, and
//! the percolation and tail statistics built on both.
//!
//! With the default `parallel` feature the inner loops run on rayon; without
//! it everything runs sequentially and produces identical output.

// `!(x > 0.0)` is how parameter checks reject NaN along with bad values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod allocation;
pub mod appetite;
pub mod boolean;
pub mod bounds;
pub mod error;
pub mod geometry;
pub mod par;
pub mod percolation;
pub mod quadrature;
pub mod replica;
pub mod rng;
pub mod spatial;
pub mod validate;

pub use allocation::{
    gale_shapley, monotonicity_violations, phase_diagnostics, verify_stability, AllocationResult, MonotonicityReport,
    PhaseDiagnostics, PointConfiguration, Site, SiteGrid, UnstablePair,
};
pub use appetite::{moment_report, sample_appetite, AppetiteDistribution, Family, MomentReport};
pub use error::{Error, Result};
pub use geometry::{distance, sample_poisson, unit_ball_volume, Boundary, Domain, Point};

//! Toolkit for detecting the gravity of a source mass held in a spatial
//! superposition by Zeno freezing.
//!
//! The crate is organised by physical subsystem:
//!
//! * [`units`]: physical constants and energy conversion.
//! * [`massdist`]: delocalized source as weighted uniform spheres, its
//!   potential and force field.
//! * [`scatter`]: classical probe trajectories, deflection angles,
//!   stereographic patterns and the hyperbolic (Rutherford/Kepler) formulas.
//! * [`zeno`]: stroboscopic projective-measurement dynamics on finite
//!   bipartite models, Zeno time and Zeno-rate bounds.
//! * [`schrod1d`]: finite-difference eigensolver for 1D multiwell traps.
//! * [`decoherence`]: rest-gas and blackbody decoherence, probe classicality
//!   and mean free path.
//! * [`feasibility`]: intersection of all constraints at a point or over a
//!   parameter grid.
//!
//! All quantities are SI unless a field says otherwise.

// `!(x > 0.0)` is used on purpose so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod decoherence;
pub mod error;
pub mod feasibility;
pub mod massdist;
pub mod table;
pub mod scatter;
pub mod schrod1d;
pub mod units;
pub mod zeno;

pub use error::{Error, Result};
pub use massdist::{MassDistribution, SphereComponent};
pub use nalgebra::Vector3;

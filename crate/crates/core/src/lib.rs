//! Planar maps whose Jacobian spectrum lies in the unit disc but whose origin
//! is not a global attractor, together with sampled numerical checks of the
//! spectral, periodic-orbit and dissipativity properties they are built on.
//!
//! * [`map`]: Szlenk's map `F`, the family `G_a = F - a·Id`, radial
//!   squashing maps and compositions, with analytic and finite-difference
//!   Jacobians.
//! * [`spectral`]: closed-form 2x2 eigenvalues and norms, sampled spectrum
//!   sweeps and spectral hypothesis checkers.
//! * [`counterexample`]: the radial profile `phi`, the squashed map
//!   `f = H ∘ G_a` and its verification pipeline.
//! * [`dynamics`]: ω-limit classification, periodic orbits, dissipativity
//!   bounds, invariant rays and basin rasters.
//! * [`output`]: JSON, CSV and PGM writers.

#![allow(clippy::neg_cmp_op_on_partial_ord)]
pub mod counterexample;
pub mod dynamics;
pub mod error;
pub mod geometry;
pub mod map;
pub mod output;
pub mod sampling;
pub mod spectral;

pub use error::{DmyError, Result};
pub use geometry::{Mat2, Point2};
pub use map::{compose, fd_jacobian, iterate, Orbit, PlanarMap};

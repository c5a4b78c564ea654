//! Orbit-level analysis of planar maps.

mod basin;
mod dissipativity;
mod omega;
mod periodic;
mod ray;

pub use basin::{
    basin_raster, BasinGrid, CODE_ESCAPING, CODE_ORIGIN, CODE_PERIODIC, CODE_UNDECIDED,
};
pub use dissipativity::{
    dissipativity_bound, outer_ball_constants, DissipativityBound, DissipativityConfig,
};
pub use omega::{classify_omega, OmegaConfig, OmegaKind, OmegaVerdict};
pub use periodic::{find_periodic, multipliers, NewtonConfig, PeriodicOrbit};
pub use ray::{ray_samples, verify_invariant_ray, RayVerdict};

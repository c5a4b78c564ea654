//! The squashed counterexample `f = H ∘ G_a`.
//!
//! `G_a` has Jacobian spectrum inside the unit disc and a hyperbolic period-4
//! orbit, but orbits escape to infinity. `H(p) = phi(|p|)·p` is the identity
//! on the disc of radius `R = 2/sqrt(k-1)` (which contains the orbit) and
//! shrinks by `1/(2C)` far out, so `f` keeps the orbit and the spectral bound
//! while infinity becomes a repellor.

mod phi;
mod verify;

pub use phi::PhiProfile;
pub use verify::{
    run_pipeline, verify_counterexample, CheckRecord, PipelineResult, VerificationReport,
};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, DmyError, Result};
use crate::map::{compose, PlanarMap};
use crate::sampling::{Region, Sampling};
use crate::spectral::{norm_sup_over, spectrum_over};

/// Largest admissible `k`: `(2/sqrt(3))·0.88`.
pub const K_MAX: f64 = crate::map::SZLENK_K_MAX * 0.88;

/// Bound the sampled spectral radius of `G_a` must respect.
pub const GA_SR_BOUND: f64 = 0.9;

/// Bound the sampled spectral radius of `f` must respect.
pub const F_SR_BOUND: f64 = 0.95;

/// Safety factor applied to the sampled norm supremum of `DG_a`.
pub const NORM_MARGIN: f64 = 1.05;

pub const MAX_EPS_HALVINGS: u32 = 20;

/// Sample layouts used while building and verifying `f`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleConfig {
    /// Half-width and per-side resolution of the lattice used for `‖DG_a‖` and `sr(G_a)`.
    pub norm_half_width: f64,
    pub norm_grid: usize,
    /// Log-polar sweep `[1e-3, norm_r_max]` for the same quantities.
    pub norm_r_max: f64,
    pub norm_radii: usize,
    pub norm_angles: usize,
    /// Lattice near the origin for spectral sweeps of `f`.
    pub sweep_half_width: f64,
    pub sweep_grid: usize,
    /// Log-polar sweep `[1e-3, 10·r_tail]` for spectral sweeps of `f`.
    pub sweep_radii: usize,
    pub sweep_angles: usize,
    /// Log-polar sweep `[r_tail, TAIL_CAP]` for the tail contraction.
    pub tail_radii: usize,
    pub tail_angles: usize,
    /// Log-spaced radii for the phi envelope check.
    pub phi_samples: usize,
}

impl Default for CounterexampleConfig {
    fn default() -> Self {
        Self {
            norm_half_width: 100.0,
            norm_grid: 401,
            norm_r_max: 1e6,
            norm_radii: 400,
            norm_angles: 360,
            sweep_half_width: 60.0,
            sweep_grid: 121,
            sweep_radii: 1000,
            sweep_angles: 96,
            tail_radii: 200,
            tail_angles: 64,
            phi_samples: 10_000,
        }
    }
}

impl CounterexampleConfig {
    pub fn validate(&self) -> Result<()> {
        let counts = [
            self.norm_grid,
            self.norm_radii,
            self.norm_angles,
            self.sweep_grid,
            self.sweep_radii,
            self.sweep_angles,
            self.tail_radii,
            self.tail_angles,
            self.phi_samples,
        ];
        if counts.contains(&0) {
            return Err(invalid("counterexample: sample counts must be positive"));
        }
        if !(self.norm_half_width > 0.0 && self.norm_r_max > 1e-3 && self.sweep_half_width > 0.0) {
            return Err(invalid("counterexample: sampling extents must be positive"));
        }
        Ok(())
    }

    /// Samples for `‖DG_a‖` and `sr(G_a)`.
    pub fn norm_sampling(&self) -> Result<Sampling> {
        Ok(Sampling::Multi {
            parts: vec![
                Sampling::grid(
                    Region::square(self.norm_half_width)?,
                    self.norm_grid,
                    self.norm_grid,
                ),
                Sampling::log_polar(1e-3, self.norm_r_max, self.norm_radii, self.norm_angles),
            ],
        })
    }

    /// Multi-scale samples for spectral sweeps of `f` out to `10·tail_radius`.
    pub fn sweep_sampling(&self, tail_radius: f64) -> Result<Sampling> {
        Ok(Sampling::Multi {
            parts: vec![
                Sampling::grid(
                    Region::square(self.sweep_half_width)?,
                    self.sweep_grid,
                    self.sweep_grid,
                ),
                Sampling::log_polar(
                    1e-3,
                    10.0 * tail_radius,
                    self.sweep_radii,
                    self.sweep_angles,
                ),
            ],
        })
    }
}

/// Everything needed to evaluate and re-verify `f = H ∘ G_a`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleBundle {
    pub k: f64,
    pub a: f64,
    pub profile: PhiProfile,
    pub g: PlanarMap,
    pub h: PlanarMap,
    pub f: PlanarMap,
    /// Sampled supremum of `‖DG_a‖`.
    pub c_raw: f64,
    /// `1.05·max(c_raw, 1)`, the `C` of the profile.
    pub c_used: f64,
    /// Sampled `sr(G_a)`.
    pub ga_sr: f64,
    /// Sampled `sr(f)` at the accepted `eps`.
    pub f_sr: f64,
    pub eps_halvings: u32,
}

impl CounterexampleBundle {
    /// Same `G_a` with a different profile; `H` and `f` are rebuilt.
    pub fn with_profile(&self, profile: PhiProfile) -> Self {
        let h = PlanarMap::radial(profile.clone());
        let f = compose(&h, &self.g);
        Self {
            profile,
            h,
            f,
            ..self.clone()
        }
    }

    pub fn inner_radius(&self) -> f64 {
        self.profile.inner_radius
    }
}

pub fn inner_radius_for(k: f64) -> f64 {
    2.0 / (k - 1.0).sqrt()
}

/// Builds `f = H ∘ G_a`.
///
/// `C` is a sampled norm bound with a 5% margin and `eps` is found by halving
/// from `min(eps_init, 0.9/(8C))` until the sampled `sr(Df)` is at most 0.95.
pub fn build_f(
    k: f64,
    a: f64,
    eps_init: f64,
    cfg: &CounterexampleConfig,
) -> Result<CounterexampleBundle> {
    if !(k > 1.0 && k < K_MAX) {
        return Err(invalid(format!(
            "k must lie in (1, (2/sqrt(3))·0.88) = (1, {K_MAX:.6}), got {k}"
        )));
    }
    if !(a > 0.0 && a < 1.0) {
        return Err(invalid(format!("a must lie in (0, 1), got {a}")));
    }
    if !(eps_init > 0.0 && eps_init.is_finite()) {
        return Err(invalid(format!(
            "initial eps must be positive, got {eps_init}"
        )));
    }
    cfg.validate()?;

    let g = PlanarMap::ga(k, a)?;
    let norm_samples = cfg.norm_sampling()?;
    let ga_sr = spectrum_over(&g, &norm_samples)?
        .max_modulus
        .map_or(0.0, |m| m.value);
    if ga_sr > GA_SR_BOUND {
        return Err(invalid(format!(
            "sampled sr(G_a) = {ga_sr} exceeds {GA_SR_BOUND} for k = {k}, a = {a}"
        )));
    }
    let c_raw = norm_sup_over(&g, &norm_samples)?.value;
    let c_used = NORM_MARGIN * c_raw.max(1.0);
    let inner = inner_radius_for(k);

    let mut eps = eps_init.min(0.9 / (8.0 * c_used));
    let mut last_sr = f64::NAN;
    for halvings in 0..=MAX_EPS_HALVINGS {
        let profile = PhiProfile::new(inner, c_used, eps)?;
        let h = PlanarMap::radial(profile.clone());
        let f = compose(&h, &g);
        let report = spectrum_over(&f, &cfg.sweep_sampling(profile.tail_radius)?)?;
        last_sr = report.max_modulus.map_or(0.0, |m| m.value);
        if report.flagged == 0 && last_sr <= F_SR_BOUND {
            return Ok(CounterexampleBundle {
                k,
                a,
                profile,
                g,
                h,
                f,
                c_raw,
                c_used,
                ga_sr,
                f_sr: last_sr,
                eps_halvings: halvings,
            });
        }
        eps *= 0.5;
    }
    Err(DmyError::EpsilonSearchExhausted {
        halvings: MAX_EPS_HALVINGS,
        last_sr,
    })
}

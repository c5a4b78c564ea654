//! Radial squashing profile.
//!
//! With `u = ln(r / R)` the profile is `phi(r) = 1 - (eps/8)·m(u)` where `m` is
//! the integral of a plateau window `sigma`: a quintic smoothstep up on
//! `[0, w]`, constant 1 on `[w, m_target]`, a quintic smoothstep down on
//! `[m_target, m_target + w]` and zero elsewhere (`w = min(1, m_target)`).
//! Then `m(inf) = m_target`, so phi settles exactly at `1/(2C)`, and
//! `phi'(r)·r = -(eps/8)·sigma(u)` never exceeds `eps/8` in magnitude.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhiProfile {
    /// Radius of the flat disc where phi is identically 1.
    pub inner_radius: f64,
    /// Jacobian norm bound the floor is derived from.
    pub norm_bound: f64,
    /// Slope budget.
    pub eps: f64,
    /// `1 / (2C)`
    pub floor: f64,
    /// Total log-decay `8·(1 - floor) / eps`.
    pub m_target: f64,
    /// Width (in `ln r`) of each smoothstep ramp.
    pub ramp: f64,
    /// `R·exp(m_target + ramp)`; phi equals the floor from here on.
    pub tail_radius: f64,
}

/// `6t^5 - 15t^4 + 10t^3`
fn smoothstep(t: f64) -> f64 {
    t * t * t * (10.0 + t * (-15.0 + 6.0 * t))
}

/// Antiderivative of [`smoothstep`] vanishing at 0: `t^6 - 3t^5 + 5t^4/2`.
fn smoothstep_integral(t: f64) -> f64 {
    let t2 = t * t;
    t2 * t2 * (2.5 + t * (-3.0 + t))
}

impl PhiProfile {
    pub fn new(inner_radius: f64, norm_bound: f64, eps: f64) -> Result<Self> {
        if !(inner_radius > 0.0 && inner_radius.is_finite()) {
            return Err(invalid(format!(
                "phi: R must be positive and finite, got {inner_radius}"
            )));
        }
        if !(norm_bound > 0.5 && norm_bound.is_finite()) {
            return Err(invalid(format!(
                "phi: C must exceed 1/2 so that the floor 1/(2C) lies in (0,1), got {norm_bound}"
            )));
        }
        let eps_max = 1.0 / (8.0 * norm_bound);
        if !(eps > 0.0 && eps < eps_max) {
            return Err(invalid(format!(
                "phi: eps must lie in (0, 1/(8C)) = (0, {eps_max}), got {eps}"
            )));
        }
        let floor = 1.0 / (2.0 * norm_bound);
        let m_target = 8.0 * (1.0 - floor) / eps;
        let ramp = m_target.min(1.0);
        let tail_radius = inner_radius * (m_target + ramp).exp();
        if !tail_radius.is_finite() {
            return Err(invalid(format!(
                "phi: tail radius R·exp({}) overflows; eps = {eps} is too small",
                m_target + ramp
            )));
        }
        Ok(Self {
            inner_radius,
            norm_bound,
            eps,
            floor,
            m_target,
            ramp,
            tail_radius,
        })
    }

    fn slope_scale(&self) -> f64 {
        self.eps / 8.0
    }

    /// Plateau window as a function of `u = ln(r/R)`; values in `[0, 1]`.
    pub fn window(&self, u: f64) -> f64 {
        let w = self.ramp;
        if u <= 0.0 || u >= self.m_target + w {
            0.0
        } else if u < w {
            smoothstep(u / w)
        } else if u <= self.m_target {
            1.0
        } else {
            1.0 - smoothstep((u - self.m_target) / w)
        }
    }

    /// Accumulated decay `m(u)`, nondecreasing from 0 to `m_target`.
    pub fn decay(&self, u: f64) -> f64 {
        let w = self.ramp;
        if u <= 0.0 {
            0.0
        } else if u < w {
            w * smoothstep_integral(u / w)
        } else if u <= self.m_target {
            0.5 * w + (u - w)
        } else if u < self.m_target + w {
            let t = (u - self.m_target) / w;
            (0.5 * w + (self.m_target - w)) + w * (t - smoothstep_integral(t))
        } else {
            self.m_target
        }
    }

    pub fn eval(&self, r: f64) -> f64 {
        if r <= self.inner_radius {
            return 1.0;
        }
        if r >= self.tail_radius {
            return self.floor;
        }
        let u = (r / self.inner_radius).ln();
        (1.0 - self.slope_scale() * self.decay(u)).clamp(self.floor, 1.0)
    }

    pub fn deriv(&self, r: f64) -> f64 {
        self.deriv_times_r(r) / r.max(f64::MIN_POSITIVE)
    }

    /// `phi'(r)·r`, computed without the division so it stays accurate at huge radii.
    pub fn deriv_times_r(&self, r: f64) -> f64 {
        if r <= self.inner_radius || r >= self.tail_radius {
            return 0.0;
        }
        let u = (r / self.inner_radius).ln();
        -self.slope_scale() * self.window(u)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn desk() -> PhiProfile {
        PhiProfile::new(20.0, 2.0, 0.05).unwrap()
    }

    #[test]
    fn derived_constants() {
        let p = desk();
        assert_eq!(p.floor, 0.25);
        assert!((p.m_target - 120.0).abs() < 1e-12);
        let expected = 20.0 * 121f64.exp();
        assert!((p.tail_radius / expected - 1.0).abs() < 1e-12);
        assert!((p.tail_radius / 7.10e53 - 1.0).abs() < 5e-3);
    }

    #[test]
    fn rejects_eps_out_of_range() {
        assert!(PhiProfile::new(20.0, 2.0, 1.0 / 16.0).is_err());
        assert!(PhiProfile::new(20.0, 2.0, 0.0).is_err());
        assert!(PhiProfile::new(20.0, 2.0, -0.01).is_err());
        assert!(PhiProfile::new(-1.0, 2.0, 0.01).is_err());
        assert!(PhiProfile::new(20.0, 0.4, 0.01).is_err());
    }

    #[test]
    fn flat_and_floor_regions() {
        let p = desk();
        assert_eq!(p.eval(0.0), 1.0);
        assert_eq!(p.deriv(0.0), 0.0);
        assert_eq!(p.eval(10.0), 1.0);
        assert_eq!(p.eval(20.0), 1.0);
        assert_eq!(p.eval(1e54), 0.25);
        assert_eq!(p.eval(1e60), 0.25);
        assert_eq!(p.deriv_times_r(1e60), 0.0);
    }

    #[test]
    fn onset_just_above_inner_radius() {
        let p = desk();
        let v = p.eval(20.0001);
        assert!(v <= 1.0 && 1.0 - v < 1e-8);
        assert!(p.deriv_times_r(20.0001).abs() <= 0.00625);
        // a visible step further out
        assert!(p.eval(20.0 * 1.5) < 1.0);
    }

    #[test]
    fn mid_decay_value() {
        let p = desk();
        let r = 20.0 * 60f64.exp();
        // m(60) = 0.5 + (60 - 1)
        let expected = 1.0 - (0.05 / 8.0) * 59.5;
        assert!((p.eval(r) - expected).abs() < 1e-12);
        assert_eq!(p.deriv_times_r(r), -0.00625);
    }

    #[test]
    fn decay_is_continuous_at_junctions() {
        let p = desk();
        for u in [p.ramp, p.m_target, p.m_target + p.ramp] {
            let lo = p.decay(u - 1e-9);
            let hi = p.decay(u + 1e-9);
            assert!((hi - lo).abs() < 1e-8, "jump at u={u}: {lo} vs {hi}");
        }
        assert!((p.decay(p.m_target + p.ramp - 1e-12) - p.m_target).abs() < 1e-9);
    }

    #[test]
    fn small_target_uses_narrow_ramps() {
        // C just above 1/2 makes m_target < 1
        let p = PhiProfile::new(1.0, 0.5001, 0.2).unwrap();
        assert!(p.m_target < 1.0);
        assert_eq!(p.ramp, p.m_target);
        assert!((p.decay(1e6) - p.m_target).abs() < 1e-15);
        assert!((p.eval(p.tail_radius * 0.999999) - p.floor).abs() < 1e-6);
    }

    #[test]
    fn derivative_matches_log_central_difference() {
        let p = desk();
        let h = 1e-5;
        let mut u = 0.01;
        while u < p.m_target + 1.5 {
            let r = 20.0 * u.exp();
            // d phi / d u = phi'(r)·r
            let fd = (p.eval(20.0 * (u + h).exp()) - p.eval(20.0 * (u - h).exp())) / (2.0 * h);
            assert!(
                (fd - p.deriv_times_r(r)).abs() < 1e-7,
                "u={u}: fd={fd} analytic={}",
                p.deriv_times_r(r)
            );
            u += 0.37;
        }
    }
}

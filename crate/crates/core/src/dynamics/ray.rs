use serde::{Deserialize, Serialize};

use crate::error::{DmyError, Result};
use crate::geometry::Point2;
use crate::map::PlanarMap;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RayVerdict {
    pub passed: bool,
    /// Largest distance from an image sample to the sampled polyline.
    pub max_deviation: f64,
    pub worst_index: usize,
    /// Every image stays within the sampled radius range.
    pub radii_contained: bool,
}

/// `m + 1` samples `t·(cos θ, sin θ)` for `t` evenly spaced in `[0, r_max]`.
pub fn ray_samples(angle: f64, r_max: f64, m: usize) -> Vec<Point2> {
    (0..=m)
        .map(|i| {
            if i == 0 {
                Point2::ORIGIN
            } else {
                Point2::from_polar(r_max * i as f64 / m as f64, angle)
            }
        })
        .collect()
}

fn segment_distance(p: Point2, a: Point2, b: Point2) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_squared();
    if len2 == 0.0 {
        return p.distance(a);
    }
    let t = ((p - a).dot(ab) / len2).clamp(0.0, 1.0);
    p.distance(a + ab.scale(t))
}

fn polyline_distance(p: Point2, curve: &[Point2]) -> f64 {
    curve
        .windows(2)
        .map(|w| segment_distance(p, w[0], w[1]))
        .fold(f64::INFINITY, f64::min)
}

/// Checks `f(γ) ⊆ γ` at sample resolution, using distance to the polyline
/// through the samples as the membership test.
pub fn verify_invariant_ray(map: &PlanarMap, ray: &[Point2], tol: f64) -> Result<RayVerdict> {
    if ray.len() < 2 {
        return Err(DmyError::Input("ray needs at least two samples".into()));
    }
    if ray[0] != Point2::ORIGIN {
        return Err(DmyError::Input("ray must start at the origin".into()));
    }
    if ray.windows(2).any(|w| !(w[1].norm() > w[0].norm())) {
        return Err(DmyError::Input(
            "ray sample radii must be strictly increasing".into(),
        ));
    }
    let r_max = ray[ray.len() - 1].norm();
    let mut max_deviation: f64 = 0.0;
    let mut worst_index = 0;
    let mut radii_contained = true;
    for (i, p) in ray.iter().enumerate() {
        let q = map.eval(*p)?;
        let d = polyline_distance(q, ray);
        if d > max_deviation {
            max_deviation = d;
            worst_index = i;
        }
        if q.norm() > r_max + tol {
            radii_contained = false;
        }
    }
    Ok(RayVerdict {
        passed: max_deviation <= tol && radii_contained,
        max_deviation,
        worst_index,
        radii_contained,
    })
}

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, DmyError, Result};
use crate::geometry::Point2;
use crate::map::PlanarMap;
use crate::sampling::{Region, Sampling};
use crate::spectral::norm_sup_over;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DissipativityConfig {
    /// Lattice resolution (per side) over `[-R, R]²` for the norm supremum.
    pub ball_grid: usize,
    /// Log-polar radii inside the ball, down to `min(R, 1)·1e-3`.
    pub ball_radii: usize,
    pub radii: usize,
    pub angles: usize,
}

impl Default for DissipativityConfig {
    fn default() -> Self {
        Self {
            ball_grid: 101,
            ball_radii: 200,
            radii: 200,
            angles: 64,
        }
    }
}

/// Sampled version of the outer-ball contraction bound: from
/// `‖Df_p·p‖ < α‖p‖` outside the `R`-ball and `‖Df‖ <= M` inside it,
/// `|f(p)| <= μ|p|` whenever `|p| >= S0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DissipativityBound {
    pub r: f64,
    pub alpha: f64,
    /// Sampled supremum of `‖Df‖` over the closed `R`-ball.
    pub m_sampled: f64,
    /// Norm bound used in the formulas, `max(m_sampled, 1)`.
    pub m: f64,
    pub s0: f64,
    pub mu: f64,
    pub hypothesis_holds: bool,
    pub hypothesis_worst_ratio: f64,
    pub hypothesis_witness: Option<Point2>,
    pub contraction_holds: bool,
    /// Largest sampled `|f(p)| / |p|` over `[S0, 100·S0]`.
    pub contraction_worst_ratio: f64,
    pub contraction_witness: Option<Point2>,
    pub samples: usize,
    pub passed: bool,
}

/// `(S0, μ) = (2(M·R - α·R)/(1 - α), (α + 1)/2)`.
pub fn outer_ball_constants(m: f64, r: f64, alpha: f64) -> (f64, f64) {
    let s0 = 2.0 * (m * r - alpha * r) / (1.0 - alpha);
    let mu = (alpha + 1.0) / 2.0;
    (s0, mu)
}

fn worst<F>(points: &[Point2], ratio: F) -> Result<(f64, Option<Point2>)>
where
    F: Fn(Point2) -> Result<f64> + Sync,
{
    let ratios: Vec<f64> = points
        .par_iter()
        .map(|p| match ratio(*p) {
            Ok(v) => Ok(v),
            Err(DmyError::NumericOverflow { .. }) => Ok(f64::INFINITY),
            Err(e) => Err(e),
        })
        .collect::<Result<_>>()?;
    let mut best = (f64::NEG_INFINITY, None);
    for (p, v) in points.iter().zip(ratios) {
        if v > best.0 {
            best = (v, Some(*p));
        }
    }
    Ok(best)
}

pub fn dissipativity_bound(
    map: &PlanarMap,
    r: f64,
    alpha: f64,
    cfg: &DissipativityConfig,
) -> Result<DissipativityBound> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(invalid(format!(
            "dissipativity: alpha must lie in (0, 1), got {alpha}"
        )));
    }
    if !(r > 0.0 && r.is_finite()) {
        return Err(invalid(format!(
            "dissipativity: R must be positive, got {r}"
        )));
    }
    if cfg.ball_grid == 0 || cfg.ball_radii == 0 || cfg.radii == 0 || cfg.angles == 0 {
        return Err(invalid("dissipativity: sample counts must be positive"));
    }

    let ball = Sampling::Multi {
        parts: vec![
            Sampling::grid(Region::square(r)?, cfg.ball_grid, cfg.ball_grid),
            Sampling::log_polar((r * 1e-3).min(1e-3), r, cfg.ball_radii, cfg.angles),
        ],
    };
    let m_sampled = norm_sup_over(map, &ball)?.value;
    let m = m_sampled.max(1.0);
    let (s0, mu) = outer_ball_constants(m, r, alpha);

    let outside: Vec<Point2> = Sampling::log_polar(r, 100.0 * s0, cfg.radii, cfg.angles)
        .points()
        .into_iter()
        .filter(|p| p.norm() > r)
        .collect();
    let (hyp_ratio, hyp_at) = worst(&outside, |p| {
        let j = map.jacobian(p)?;
        Ok(j.apply(p).norm() / p.norm())
    })?;

    let tail = Sampling::log_polar(s0, 100.0 * s0, cfg.radii, cfg.angles).points();
    let (con_ratio, con_at) = worst(&tail, |p| Ok(map.eval(p)?.norm() / p.norm()))?;

    let hypothesis_holds = hyp_ratio < alpha;
    let contraction_holds = con_ratio <= mu;
    Ok(DissipativityBound {
        r,
        alpha,
        m_sampled,
        m,
        s0,
        mu,
        hypothesis_holds,
        hypothesis_worst_ratio: hyp_ratio,
        hypothesis_witness: if hypothesis_holds { None } else { hyp_at },
        contraction_holds,
        contraction_worst_ratio: con_ratio,
        contraction_witness: if contraction_holds { None } else { con_at },
        samples: ball.len() + outside.len() + tail.len(),
        passed: hypothesis_holds && contraction_holds,
    })
}

use serde::{Deserialize, Serialize};

use crate::error::{invalid, DmyError, Result};
use crate::geometry::{Mat2, Point2};
use crate::map::{fd_jacobian, PlanarMap};
use crate::spectral::{eig2, EigenPair};

/// Band around the unit circle inside which a multiplier is not hyperbolic.
pub const HYPERBOLIC_BAND: f64 = 1e-6;

const MIN_NEWTON_DET: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NewtonConfig {
    /// Closure residual `|fⁿ(p) - p|` at which the search stops.
    pub tol: f64,
    pub max_steps: usize,
}

impl Default for NewtonConfig {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_steps: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodicOrbit {
    pub period: usize,
    pub points: Vec<Point2>,
    /// `|fⁿ(p₀) - p₀|`
    pub residual: f64,
    pub multipliers: EigenPair,
    pub hyperbolic: bool,
    pub newton_steps: usize,
}

impl PeriodicOrbit {
    /// Smallest distance from a multiplier modulus to 1.
    pub fn distance_from_unit_circle(&self) -> f64 {
        self.multipliers
            .as_array()
            .iter()
            .map(|l| (l.norm() - 1.0).abs())
            .fold(f64::INFINITY, f64::min)
    }
}

/// `fⁿ(p)` and `D(fⁿ)(p)` by the chain rule along the orbit.
fn orbit_with_jacobian(map: &PlanarMap, p: Point2, n: usize, fd: bool) -> Result<(Point2, Mat2)> {
    let mut q = p;
    let mut j = Mat2::IDENTITY;
    for _ in 0..n {
        let jq = if fd {
            let h = 1e-6 * q.norm().max(1.0);
            fd_jacobian(map, q, h)?
        } else {
            map.jacobian(q)?
        };
        j = jq * j;
        q = map.eval(q)?;
    }
    Ok((q, j))
}

/// Eigenvalues of `Df(p_{n-1}) ··· Df(p_0)`.
pub fn multipliers(map: &PlanarMap, points: &[Point2]) -> Result<EigenPair> {
    if points.is_empty() {
        return Err(invalid("multipliers: empty orbit"));
    }
    let mut j = Mat2::IDENTITY;
    for p in points {
        j = map.jacobian(*p)? * j;
    }
    Ok(eig2(&j))
}

fn is_hyperbolic(m: &EigenPair) -> bool {
    m.as_array()
        .iter()
        .all(|l| (l.norm() - 1.0).abs() > HYPERBOLIC_BAND)
}

/// Newton's method on `x ↦ fⁿ(x) - x` started at `seed`.
///
/// The Newton matrix `D(fⁿ) - I` is assembled from analytic Jacobians; when it
/// is singular the step is retried once with central differences.
pub fn find_periodic(
    map: &PlanarMap,
    n: usize,
    seed: Point2,
    cfg: &NewtonConfig,
) -> Result<PeriodicOrbit> {
    if n == 0 {
        return Err(invalid("find_periodic: period must be at least 1"));
    }
    if !(cfg.tol > 0.0) || cfg.max_steps == 0 {
        return Err(invalid(
            "find_periodic: tolerance and step budget must be positive",
        ));
    }
    if !seed.is_finite() {
        return Err(DmyError::NonFiniteInput {
            x: seed.x,
            y: seed.y,
        });
    }

    let mut x = seed;
    let mut residual = f64::INFINITY;
    for step in 0..=cfg.max_steps {
        let (image, jac) = orbit_with_jacobian(map, x, n, false)?;
        let g = image - x;
        residual = g.norm();
        if residual < cfg.tol {
            return finish(map, n, x, residual, step);
        }
        if step == cfg.max_steps {
            break;
        }
        let dx = match jac.shift_diag(1.0).solve(g, MIN_NEWTON_DET) {
            Some(dx) => dx,
            None => {
                let (_, jac_fd) = orbit_with_jacobian(map, x, n, true)?;
                let newton = jac_fd.shift_diag(1.0);
                newton
                    .solve(g, MIN_NEWTON_DET)
                    .ok_or(DmyError::SingularNewton {
                        det: newton.det(),
                        at: x,
                    })?
            }
        };
        x = x - dx;
        if !x.is_finite() {
            break;
        }
    }
    Err(DmyError::NoConvergence {
        steps: cfg.max_steps,
        residual,
        last: x,
    })
}

fn finish(
    map: &PlanarMap,
    n: usize,
    p0: Point2,
    residual: f64,
    steps: usize,
) -> Result<PeriodicOrbit> {
    let mut points = Vec::with_capacity(n);
    let mut q = p0;
    for _ in 0..n {
        points.push(q);
        q = map.eval(q)?;
    }
    let mult = multipliers(map, &points)?;
    Ok(PeriodicOrbit {
        period: n,
        points,
        residual,
        hyperbolic: is_hyperbolic(&mult),
        multipliers: mult,
        newton_steps: steps,
    })
}

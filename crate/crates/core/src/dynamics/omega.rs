use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, DmyError, Result};
use crate::geometry::Point2;
use crate::map::PlanarMap;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OmegaConfig {
    pub max_iterations: usize,
    /// Radius of the ball around the origin counted as "at the origin".
    pub origin_tol: f64,
    pub escape_radius: f64,
    /// Number of trailing iterates kept for cycle detection; also the number
    /// of consecutive iterates that must stay near the origin.
    pub window: usize,
    /// Relative closeness for two iterates to count as the same point.
    pub cycle_rel_tol: f64,
}

impl Default for OmegaConfig {
    fn default() -> Self {
        Self {
            max_iterations: 10_000,
            origin_tol: 1e-9,
            escape_radius: 1e9,
            window: 64,
            cycle_rel_tol: 1e-7,
        }
    }
}

impl OmegaConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 || self.window == 0 {
            return Err(invalid(
                "omega: iteration budget and window must be positive",
            ));
        }
        if !(self.origin_tol > 0.0 && self.escape_radius > 0.0 && self.cycle_rel_tol > 0.0) {
            return Err(invalid(
                "omega: tolerances and escape radius must be positive",
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "tag", rename_all = "snake_case")]
pub enum OmegaKind {
    ConvergesToOrigin,
    Periodic {
        period: usize,
        representative: Point2,
    },
    Escaping {
        first_escape: usize,
    },
    Undecided,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OmegaVerdict {
    pub kind: OmegaKind,
    pub iterations: usize,
    /// Norm of the last iterate (origin, escape) or cycle closure distance (periodic).
    pub distance: f64,
}

fn same_point(a: Point2, b: Point2, rel_tol: f64) -> bool {
    a.distance(b) <= rel_tol * a.norm().max(b.norm())
}

/// Smallest lag `L <= window` such that the last `L` iterates repeat the `L`
/// before them.
fn detect_cycle(tail: &VecDeque<Point2>, window: usize, rel_tol: f64) -> Option<usize> {
    let n = tail.len();
    (1..=window.min(n / 2))
        .find(|&lag| (0..lag).all(|i| same_point(tail[n - 1 - i], tail[n - 1 - i - lag], rel_tol)))
}

/// Classifies the forward orbit of `p` under `map`.
///
/// Decisions depend only on the orbit prefix seen so far, so a larger budget
/// can resolve `Undecided` but never changes a decided verdict.
pub fn classify_omega(map: &PlanarMap, p: Point2, cfg: &OmegaConfig) -> Result<OmegaVerdict> {
    cfg.validate()?;
    if !p.is_finite() {
        return Err(DmyError::NonFiniteInput { x: p.x, y: p.y });
    }
    // tail holds up to 2·window iterates so a full period can be confirmed twice
    let mut tail: VecDeque<Point2> = VecDeque::with_capacity(2 * cfg.window + 1);
    tail.push_back(p);
    let mut near_origin = usize::from(p.norm() <= cfg.origin_tol);
    let mut q = p;

    for n in 1..=cfg.max_iterations {
        q = match map.eval(q) {
            Ok(next) => next,
            Err(DmyError::NumericOverflow { .. }) => {
                return Ok(OmegaVerdict {
                    kind: OmegaKind::Escaping { first_escape: n },
                    iterations: n,
                    distance: f64::INFINITY,
                })
            }
            Err(e) => return Err(e),
        };
        let r = q.norm();
        if r > cfg.escape_radius {
            return Ok(OmegaVerdict {
                kind: OmegaKind::Escaping { first_escape: n },
                iterations: n,
                distance: r,
            });
        }
        if r <= cfg.origin_tol {
            near_origin += 1;
            if near_origin >= cfg.window {
                return Ok(OmegaVerdict {
                    kind: OmegaKind::ConvergesToOrigin,
                    iterations: n,
                    distance: r,
                });
            }
        } else {
            near_origin = 0;
        }

        if tail.len() == 2 * cfg.window {
            tail.pop_front();
        }
        tail.push_back(q);
        if near_origin == 0 {
            if let Some(period) = detect_cycle(&tail, cfg.window, cfg.cycle_rel_tol) {
                let back = tail[tail.len() - 1 - period];
                return Ok(OmegaVerdict {
                    kind: OmegaKind::Periodic {
                        period,
                        representative: q,
                    },
                    iterations: n,
                    distance: q.distance(back),
                });
            }
        }
    }
    Ok(OmegaVerdict {
        kind: OmegaKind::Undecided,
        iterations: cfg.max_iterations,
        distance: q.norm(),
    })
}

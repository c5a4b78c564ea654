//! The planar map family: linear maps, Szlenk's map, its contracted family
//! `G_a = F - a·Id`, radial squashing maps and compositions.

use serde::{Deserialize, Serialize};

use crate::counterexample::PhiProfile;
use crate::error::{invalid, DmyError, Result};
use crate::geometry::{Mat2, Point2};

/// Upper end of the admissible Szlenk parameter range, `2/sqrt(3)`.
pub const SZLENK_K_MAX: f64 = 1.154_700_538_379_251_5;

/// Default escape radius for [`iterate`].
pub const DEFAULT_ESCAPE_RADIUS: f64 = 1e9;

/// A differentiable map of the plane fixing the origin.
///
/// `Composite` applies its members right to left, so `[h, g]` is `h ∘ g`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PlanarMap {
    Linear { matrix: Mat2 },
    Szlenk { k: f64 },
    Ga { k: f64, a: f64 },
    Radial { profile: PhiProfile },
    Composite { maps: Vec<PlanarMap> },
}

fn check_szlenk_k(k: f64) -> Result<()> {
    if k > 1.0 && k < SZLENK_K_MAX {
        Ok(())
    } else {
        Err(invalid(format!(
            "Szlenk parameter k must lie in (1, 2/sqrt(3)), got {k}"
        )))
    }
}

impl PlanarMap {
    pub fn linear(matrix: Mat2) -> Result<Self> {
        if !matrix.is_finite() {
            return Err(invalid("linear map: matrix entries must be finite"));
        }
        Ok(PlanarMap::Linear { matrix })
    }

    pub fn identity() -> Self {
        PlanarMap::Linear {
            matrix: Mat2::IDENTITY,
        }
    }

    pub fn szlenk(k: f64) -> Result<Self> {
        check_szlenk_k(k)?;
        Ok(PlanarMap::Szlenk { k })
    }

    pub fn ga(k: f64, a: f64) -> Result<Self> {
        check_szlenk_k(k)?;
        if !(a > 0.0 && a < 1.0) {
            return Err(invalid(format!(
                "G_a parameter a must lie in (0, 1), got {a}"
            )));
        }
        Ok(PlanarMap::Ga { k, a })
    }

    pub fn radial(profile: PhiProfile) -> Self {
        PlanarMap::Radial { profile }
    }

    pub fn composite(maps: Vec<PlanarMap>) -> Result<Self> {
        if maps.is_empty() {
            return Err(invalid("composite map must have at least one member"));
        }
        Ok(PlanarMap::Composite { maps })
    }

    /// Re-checks every parameter invariant (used after deserialization).
    pub fn validate(&self) -> Result<()> {
        match self {
            PlanarMap::Linear { matrix } => PlanarMap::linear(*matrix).map(|_| ()),
            PlanarMap::Szlenk { k } => check_szlenk_k(*k),
            PlanarMap::Ga { k, a } => PlanarMap::ga(*k, *a).map(|_| ()),
            PlanarMap::Radial { profile } => {
                let rebuilt =
                    PhiProfile::new(profile.inner_radius, profile.norm_bound, profile.eps)?;
                if &rebuilt != profile {
                    return Err(invalid("radial map: profile fields are inconsistent"));
                }
                Ok(())
            }
            PlanarMap::Composite { maps } => {
                if maps.is_empty() {
                    return Err(invalid("composite map must have at least one member"));
                }
                maps.iter().try_for_each(PlanarMap::validate)
            }
        }
    }

    pub fn variant_name(&self) -> &'static str {
        match self {
            PlanarMap::Linear { .. } => "linear",
            PlanarMap::Szlenk { .. } => "szlenk",
            PlanarMap::Ga { .. } => "ga",
            PlanarMap::Radial { .. } => "radial",
            PlanarMap::Composite { .. } => "composite",
        }
    }

    /// Short human-readable description, e.g. `ga(k=1.01, a=0.005)`.
    pub fn describe(&self) -> String {
        match self {
            PlanarMap::Linear { matrix: m } => {
                format!("linear([[{}, {}], [{}, {}]])", m.a11, m.a12, m.a21, m.a22)
            }
            PlanarMap::Szlenk { k } => format!("szlenk(k={k})"),
            PlanarMap::Ga { k, a } => format!("ga(k={k}, a={a})"),
            PlanarMap::Radial { profile } => format!(
                "radial(R={}, C={}, eps={})",
                profile.inner_radius, profile.norm_bound, profile.eps
            ),
            PlanarMap::Composite { maps } => {
                let parts: Vec<String> = maps.iter().map(PlanarMap::describe).collect();
                parts.join(" ∘ ")
            }
        }
    }

    pub fn eval(&self, p: Point2) -> Result<Point2> {
        check_input(p)?;
        self.eval_unchecked(p)
    }

    fn eval_unchecked(&self, p: Point2) -> Result<Point2> {
        let out = match self {
            PlanarMap::Linear { matrix } => matrix.apply(p),
            PlanarMap::Szlenk { k } => szlenk(*k, p),
            PlanarMap::Ga { k, a } => {
                let f = szlenk(*k, p);
                Point2::new(f.x - a * p.x, f.y - a * p.y)
            }
            PlanarMap::Radial { profile } => {
                let phi = profile.eval(p.norm());
                Point2::new(phi * p.x, phi * p.y)
            }
            PlanarMap::Composite { maps } => {
                let mut q = p;
                for m in maps.iter().rev() {
                    q = m.eval_unchecked(q)?;
                }
                q
            }
        };
        finite_or_overflow(out, self)
    }

    pub fn jacobian(&self, p: Point2) -> Result<Mat2> {
        self.eval_jacobian(p).map(|(_, j)| j)
    }

    /// Image and Jacobian in one pass.
    pub fn eval_jacobian(&self, p: Point2) -> Result<(Point2, Mat2)> {
        check_input(p)?;
        self.eval_jacobian_unchecked(p)
    }

    fn eval_jacobian_unchecked(&self, p: Point2) -> Result<(Point2, Mat2)> {
        let (q, j) = match self {
            PlanarMap::Linear { matrix } => (matrix.apply(p), *matrix),
            PlanarMap::Szlenk { k } => (szlenk(*k, p), szlenk_jacobian(*k, p)),
            PlanarMap::Ga { k, a } => {
                let f = szlenk(*k, p);
                let q = Point2::new(f.x - a * p.x, f.y - a * p.y);
                (q, szlenk_jacobian(*k, p).shift_diag(*a))
            }
            PlanarMap::Radial { profile } => {
                let r = p.norm();
                let phi = profile.eval(r);
                let q = Point2::new(phi * p.x, phi * p.y);
                if r == 0.0 {
                    (q, Mat2::IDENTITY.scale(phi))
                } else {
                    // phi·I + phi'(r)/r · p pᵀ, with the unit vector taken first
                    let s = profile.deriv_times_r(r);
                    let (ux, uy) = (p.x / r, p.y / r);
                    let j = Mat2::new(
                        phi + s * ux * ux,
                        s * ux * uy,
                        s * ux * uy,
                        phi + s * uy * uy,
                    );
                    (q, j)
                }
            }
            PlanarMap::Composite { maps } => {
                let mut q = p;
                let mut j = Mat2::IDENTITY;
                for m in maps.iter().rev() {
                    let (next, jm) = m.eval_jacobian_unchecked(q)?;
                    j = jm * j;
                    q = next;
                }
                (q, j)
            }
        };
        let q = finite_or_overflow(q, self)?;
        if !j.is_finite() {
            return Err(DmyError::NumericOverflow {
                map: self.variant_name(),
            });
        }
        Ok((q, j))
    }
}

fn check_input(p: Point2) -> Result<()> {
    if p.is_finite() {
        Ok(())
    } else {
        Err(DmyError::NonFiniteInput { x: p.x, y: p.y })
    }
}

fn finite_or_overflow(q: Point2, map: &PlanarMap) -> Result<Point2> {
    if q.is_finite() {
        Ok(q)
    } else {
        Err(DmyError::NumericOverflow {
            map: map.variant_name(),
        })
    }
}

/// `F(x,y) = (-k y³, k x³) / (1 + x² + y²)`
fn szlenk(k: f64, p: Point2) -> Point2 {
    let (x, y) = (p.x, p.y);
    let d = 1.0 + x * x + y * y;
    Point2::new(-k * y * y * y / d, k * x * x * x / d)
}

fn szlenk_jacobian(k: f64, p: Point2) -> Mat2 {
    let (x, y) = (p.x, p.y);
    let (x2, y2) = (x * x, y * y);
    let d = 1.0 + x2 + y2;
    let d2 = d * d;
    // ∂/∂x (-k y³/d) = 2k x y³/d², ∂/∂y (-k y³/d) = -k y² (3 + 3x² + y²)/d²
    // ∂/∂x (k x³/d) = k x² (3 + x² + 3y²)/d², ∂/∂y (k x³/d) = -2k x³ y/d²
    Mat2::new(
        2.0 * k * x * y2 * y / d2,
        -k * y2 * (3.0 + 3.0 * x2 + y2) / d2,
        k * x2 * (3.0 + x2 + 3.0 * y2) / d2,
        -2.0 * k * x2 * x * y / d2,
    )
}

pub fn eval(map: &PlanarMap, p: Point2) -> Result<Point2> {
    map.eval(p)
}

pub fn jacobian(map: &PlanarMap, p: Point2) -> Result<Mat2> {
    map.jacobian(p)
}

/// Central-difference Jacobian with step `h`.
pub fn fd_jacobian(map: &PlanarMap, p: Point2, h: f64) -> Result<Mat2> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(invalid(format!(
            "finite-difference step must be positive, got {h}"
        )));
    }
    check_input(p)?;
    let dx = Point2::new(h, 0.0);
    let dy = Point2::new(0.0, h);
    let fxp = map.eval(p + dx)?;
    let fxm = map.eval(p - dx)?;
    let fyp = map.eval(p + dy)?;
    let fym = map.eval(p - dy)?;
    let inv = 1.0 / (2.0 * h);
    Ok(Mat2::new(
        (fxp.x - fxm.x) * inv,
        (fyp.x - fym.x) * inv,
        (fxp.y - fxm.y) * inv,
        (fyp.y - fym.y) * inv,
    ))
}

/// `outer ∘ inner`. Nested composites are flattened.
pub fn compose(outer: &PlanarMap, inner: &PlanarMap) -> PlanarMap {
    let mut maps = Vec::new();
    for m in [outer, inner] {
        match m {
            PlanarMap::Composite { maps: inner_maps } => maps.extend(inner_maps.iter().cloned()),
            other => maps.push(other.clone()),
        }
    }
    PlanarMap::Composite { maps }
}

/// Forward orbit `p, f(p), …, fⁿ(p)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Orbit {
    pub points: Vec<Point2>,
    /// Set when the orbit left the escape radius (or overflowed) before `n` steps.
    pub escaped: bool,
}

pub fn iterate(map: &PlanarMap, p: Point2, n: usize) -> Result<Orbit> {
    iterate_with_escape(map, p, n, DEFAULT_ESCAPE_RADIUS)
}

pub fn iterate_with_escape(
    map: &PlanarMap,
    p: Point2,
    n: usize,
    escape_radius: f64,
) -> Result<Orbit> {
    check_input(p)?;
    let mut points = Vec::with_capacity(n + 1);
    points.push(p);
    let mut q = p;
    for _ in 0..n {
        match map.eval(q) {
            Ok(next) => {
                points.push(next);
                q = next;
                if next.norm() > escape_radius {
                    return Ok(Orbit {
                        points,
                        escaped: true,
                    });
                }
            }
            Err(DmyError::NumericOverflow { .. }) => {
                return Ok(Orbit {
                    points,
                    escaped: true,
                })
            }
            Err(e) => return Err(e),
        }
    }
    Ok(Orbit {
        points,
        escaped: false,
    })
}

//! Deterministic sample sets over regions of the plane.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, DmyError, Result};
use crate::geometry::Point2;

/// Axis-aligned rectangle `[xmin, xmax] × [ymin, ymax]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub xmin: f64,
    pub xmax: f64,
    pub ymin: f64,
    pub ymax: f64,
}

impl Region {
    pub fn new(xmin: f64, xmax: f64, ymin: f64, ymax: f64) -> Result<Self> {
        let r = Self {
            xmin,
            xmax,
            ymin,
            ymax,
        };
        r.validate()?;
        Ok(r)
    }

    /// The square `[-half, half]²`.
    pub fn square(half: f64) -> Result<Self> {
        Self::new(-half, half, -half, half)
    }

    pub fn validate(&self) -> Result<()> {
        let all_finite = [self.xmin, self.xmax, self.ymin, self.ymax]
            .iter()
            .all(|v| v.is_finite());
        if !all_finite || !(self.xmin < self.xmax) || !(self.ymin < self.ymax) {
            return Err(invalid(format!("empty or non-finite region {self}")));
        }
        Ok(())
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}:{}", self.xmin, self.xmax, self.ymin, self.ymax)
    }
}

/// Parses `xmin:xmax:ymin:ymax`.
impl FromStr for Region {
    type Err = DmyError;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 4 {
            return Err(DmyError::Input(format!(
                "region must be xmin:xmax:ymin:ymax, got '{s}'"
            )));
        }
        let mut v = [0.0; 4];
        for (slot, part) in v.iter_mut().zip(&parts) {
            *slot = part
                .trim()
                .parse()
                .map_err(|_| DmyError::Input(format!("bad number '{part}' in region '{s}'")))?;
        }
        Region::new(v[0], v[1], v[2], v[3])
    }
}

/// How sample points are laid out.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Sampling {
    /// `nx × ny` lattice including the region's corners.
    Grid {
        region: Region,
        nx: usize,
        ny: usize,
    },
    /// `n` uniform points from a ChaCha8 stream seeded with `seed`.
    Random { region: Region, n: usize, seed: u64 },
    /// `radii` log-spaced radii in `[r_min, r_max]` times `angles` equally spaced angles.
    LogPolar {
        r_min: f64,
        r_max: f64,
        radii: usize,
        angles: usize,
    },
    /// Concatenation of several layouts, in order.
    Multi { parts: Vec<Sampling> },
}

fn lattice(lo: f64, hi: f64, n: usize, i: usize) -> f64 {
    if n == 1 {
        0.5 * (lo + hi)
    } else {
        lo + (hi - lo) * (i as f64) / ((n - 1) as f64)
    }
}

/// `n` log-spaced values from `lo` to `hi` inclusive.
pub fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| {
            if i == 0 {
                lo
            } else if i == n - 1 {
                hi
            } else {
                (a + (b - a) * (i as f64) / ((n - 1) as f64)).exp()
            }
        })
        .collect()
}

impl Sampling {
    pub fn grid(region: Region, nx: usize, ny: usize) -> Self {
        Sampling::Grid { region, nx, ny }
    }

    pub fn random(region: Region, n: usize, seed: u64) -> Self {
        Sampling::Random { region, n, seed }
    }

    pub fn log_polar(r_min: f64, r_max: f64, radii: usize, angles: usize) -> Self {
        Sampling::LogPolar {
            r_min,
            r_max,
            radii,
            angles,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Sampling::Grid { region, nx, ny } => {
                region.validate()?;
                if *nx == 0 || *ny == 0 {
                    return Err(invalid("grid dimensions must be at least 1"));
                }
            }
            Sampling::Random { region, n, .. } => {
                region.validate()?;
                if *n == 0 {
                    return Err(invalid("random sample count must be at least 1"));
                }
            }
            Sampling::LogPolar {
                r_min,
                r_max,
                radii,
                angles,
            } => {
                if !(*r_min > 0.0 && r_min <= r_max && r_max.is_finite()) {
                    return Err(invalid(format!(
                        "log-polar radii must satisfy 0 < r_min <= r_max, got [{r_min}, {r_max}]"
                    )));
                }
                if *radii == 0 || *angles == 0 {
                    return Err(invalid("log-polar counts must be at least 1"));
                }
            }
            Sampling::Multi { parts } => {
                if parts.is_empty() {
                    return Err(invalid("multi sampling needs at least one part"));
                }
                parts.iter().try_for_each(Sampling::validate)?;
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        match self {
            Sampling::Grid { nx, ny, .. } => nx * ny,
            Sampling::Random { n, .. } => *n,
            Sampling::LogPolar { radii, angles, .. } => radii * angles,
            Sampling::Multi { parts } => parts.iter().map(Sampling::len).sum(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// All sample points in a fixed order. Grids are row-major from `ymin` upward.
    pub fn points(&self) -> Vec<Point2> {
        let mut out = Vec::with_capacity(self.len());
        self.push_points(&mut out);
        out
    }

    fn push_points(&self, out: &mut Vec<Point2>) {
        match self {
            Sampling::Grid { region, nx, ny } => {
                for j in 0..*ny {
                    let y = lattice(region.ymin, region.ymax, *ny, j);
                    for i in 0..*nx {
                        out.push(Point2::new(lattice(region.xmin, region.xmax, *nx, i), y));
                    }
                }
            }
            Sampling::Random { region, n, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                for _ in 0..*n {
                    let x = rng.gen_range(region.xmin..=region.xmax);
                    let y = rng.gen_range(region.ymin..=region.ymax);
                    out.push(Point2::new(x, y));
                }
            }
            Sampling::LogPolar {
                r_min,
                r_max,
                radii,
                angles,
            } => {
                for r in log_space(*r_min, *r_max, *radii) {
                    for j in 0..*angles {
                        out.push(Point2::from_polar(r, TAU * (j as f64) / (*angles as f64)));
                    }
                }
            }
            Sampling::Multi { parts } => {
                for part in parts {
                    part.push_points(out);
                }
            }
        }
    }
}

/// Parses `NxM` grid dimensions.
pub fn parse_grid_dims(s: &str) -> Result<(usize, usize)> {
    let (a, b) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| DmyError::Input(format!("grid must be NxM, got '{s}'")))?;
    let nx = a
        .trim()
        .parse()
        .map_err(|_| DmyError::Input(format!("bad grid width in '{s}'")))?;
    let ny = b
        .trim()
        .parse()
        .map_err(|_| DmyError::Input(format!("bad grid height in '{s}'")))?;
    Ok((nx, ny))
}

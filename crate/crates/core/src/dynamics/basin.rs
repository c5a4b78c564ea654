use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::omega::{classify_omega, OmegaConfig, OmegaKind};
use crate::error::{invalid, Result};
use crate::geometry::Point2;
use crate::map::PlanarMap;

pub const CODE_ORIGIN: u8 = 0;
pub const CODE_PERIODIC: u8 = 1;
pub const CODE_ESCAPING: u8 = 2;
pub const CODE_UNDECIDED: u8 = 3;

/// Per-cell ω-limit classes over `[-L, L]²`, row-major with the top row (largest `y`) first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasinGrid {
    pub half_width: f64,
    pub width: usize,
    pub height: usize,
    pub cells: Vec<u8>,
}

impl BasinGrid {
    pub fn count(&self, code: u8) -> usize {
        self.cells.iter().filter(|&&c| c == code).count()
    }

    pub fn cell_center(&self, col: usize, row: usize) -> Point2 {
        cell_center(self.half_width, self.width, self.height, col, row)
    }
}

fn cell_center(l: f64, w: usize, h: usize, col: usize, row: usize) -> Point2 {
    let x = -l + (col as f64 + 0.5) * (2.0 * l) / w as f64;
    let y = l - (row as f64 + 0.5) * (2.0 * l) / h as f64;
    Point2::new(x, y)
}

pub fn code_for(kind: &OmegaKind) -> u8 {
    match kind {
        OmegaKind::ConvergesToOrigin => CODE_ORIGIN,
        OmegaKind::Periodic { .. } => CODE_PERIODIC,
        OmegaKind::Escaping { .. } => CODE_ESCAPING,
        OmegaKind::Undecided => CODE_UNDECIDED,
    }
}

/// Classifies every cell center of a `w × h` raster of `[-L, L]²`. Rows are
/// computed in parallel and assembled in order.
pub fn basin_raster(
    map: &PlanarMap,
    l: f64,
    (w, h): (usize, usize),
    cfg: &OmegaConfig,
) -> Result<BasinGrid> {
    if !(l > 0.0 && l.is_finite()) {
        return Err(invalid(format!(
            "basin: half-width must be positive, got {l}"
        )));
    }
    if w < 2 || h < 2 {
        return Err(invalid(format!(
            "basin: resolution must be at least 2x2, got {w}x{h}"
        )));
    }
    cfg.validate()?;
    let rows: Vec<Vec<u8>> = (0..h)
        .into_par_iter()
        .map(|row| {
            (0..w)
                .map(|col| {
                    let p = cell_center(l, w, h, col, row);
                    classify_omega(map, p, cfg).map(|v| code_for(&v.kind))
                })
                .collect::<Result<Vec<u8>>>()
        })
        .collect::<Result<_>>()?;
    Ok(BasinGrid {
        half_width: l,
        width: w,
        height: h,
        cells: rows.concat(),
    })
}

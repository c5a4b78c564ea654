use std::io;

use thiserror::Error;

use crate::geometry::Point2;

#[derive(Debug, Error)]
pub enum DmyError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("non-finite input point ({x}, {y})")]
    NonFiniteInput { x: f64, y: f64 },

    #[error("numeric overflow while evaluating {map} map")]
    NumericOverflow { map: &'static str },

    #[error("singular Newton matrix (det = {det:e}) at ({}, {})", at.x, at.y)]
    SingularNewton { det: f64, at: Point2 },

    #[error("Newton iteration did not converge after {steps} steps (residual {residual:e}, last iterate ({}, {}))", last.x, last.y)]
    NoConvergence {
        steps: usize,
        residual: f64,
        last: Point2,
    },

    #[error("epsilon search exhausted after {halvings} halvings (last sampled sr = {last_sr})")]
    EpsilonSearchExhausted { halvings: u32, last_sr: f64 },

    #[error("invalid input: {0}")]
    Input(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = DmyError> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> DmyError {
    DmyError::InvalidParameter(msg.into())
}

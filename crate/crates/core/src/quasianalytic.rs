//! Taylor propagation of vanishing for functions with sparse derivative bounds
//! `F_{d_n} <= c^{d_n} d_n^{d_n}`.
//!
//! Around a point of infinite-order vanishing the Taylor remainder gives
//! `|f(x)| <= (c e |x - x0|)^{d_n}`, which forces `f = 0` on the disc of radius
//! `1/(c e)`. Walking across `[a, b]` in half-radius steps covers the interval.

use std::f64::consts::E;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sequences::LogSequence;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PropagationError {
    #[error("constant c must be positive and finite, got {0}")]
    InvalidConstant(f64),
    #[error("interval must satisfy a < b, got [{a}, {b}]")]
    EmptyInterval { a: f64, b: f64 },
    #[error("distance must be non-negative, got {0}")]
    NegativeDistance(f64),
}

fn check_constant(c: f64) -> Result<(), PropagationError> {
    if c > 0.0 && c.is_finite() {
        Ok(())
    } else {
        Err(PropagationError::InvalidConstant(c))
    }
}

/// `1 / (c e)`.
pub fn vanishing_radius(c: f64) -> Result<f64, PropagationError> {
    check_constant(c)?;
    Ok(1.0 / (c * E))
}

/// Log of the Taylor bound `(c e dist)^d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VanishingBound {
    /// `d ln(c e dist)`.
    Log(f64),
    /// `dist = 0`: the bound is the zero function.
    IdenticallyZero,
}

impl VanishingBound {
    /// The log value, with `-inf` for the zero bound.
    pub fn as_log(self) -> f64 {
        match self {
            Self::Log(v) => v,
            Self::IdenticallyZero => f64::NEG_INFINITY,
        }
    }
}

pub fn taylor_vanishing_bound(
    c: f64,
    dist: f64,
    d: u32,
) -> Result<VanishingBound, PropagationError> {
    check_constant(c)?;
    if dist.is_nan() || dist < 0.0 {
        return Err(PropagationError::NegativeDistance(dist));
    }
    if dist == 0.0 {
        return Ok(VanishingBound::IdenticallyZero);
    }
    Ok(VanishingBound::Log(f64::from(d) * (c * E * dist).ln()))
}

/// Smallest `c` with `M_n <= c^n n^n` on the stored prefix (`n >= 1`).
pub fn taylor_constant(seq: &LogSequence) -> f64 {
    seq.logs()
        .iter()
        .enumerate()
        .skip(1)
        .map(|(n, &l)| l / n as f64 - (n as f64).ln())
        .fold(f64::NEG_INFINITY, f64::max)
        .exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PropagationPlan {
    pub radius: f64,
    pub steps: u64,
    pub c: f64,
}

/// Half-radius stepping plan covering `[a, b]`.
pub fn propagation_plan(a: f64, b: f64, c: f64) -> Result<PropagationPlan, PropagationError> {
    check_constant(c)?;
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(PropagationError::EmptyInterval { a, b });
    }
    let radius = vanishing_radius(c)?;
    let half = radius / 2.0;
    let len = b - a;
    let mut steps = ((len / half).ceil() as u64).max(1);
    while (steps as f64) * half < len {
        steps += 1;
    }
    Ok(PropagationPlan { radius, steps, c })
}

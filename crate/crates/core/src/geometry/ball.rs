//! Norm balls and the normal-cone residual check.

use nalgebra::DVector;

use super::NormDescriptor;
use crate::error::{Error, Result};

/// Absolute tolerance on the norm value for ball membership tests.
pub const MEMBERSHIP_TOL: f64 = 1e-12;

/// How far outside the ball a point may sit before normal-cone checks
/// reject it as an argument error.
const OUTSIDE_TOL: f64 = 1e-9;

/// The ball `{ z : |z - center| <= radius }` in the given norm.
#[derive(Clone, Debug)]
pub struct Ball {
    center: DVector<f64>,
    radius: f64,
    norm: NormDescriptor,
}

impl Ball {
    pub fn new(center: DVector<f64>, radius: f64, norm: NormDescriptor) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::invalid(format!(
                "ball radius must be strictly positive, got {radius}"
            )));
        }
        if center.len() != norm.dim() {
            return Err(Error::DimensionMismatch {
                expected: norm.dim(),
                got: center.len(),
            });
        }
        Ok(Self { center, radius, norm })
    }

    pub fn center(&self) -> &DVector<f64> {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn norm(&self) -> &NormDescriptor {
        &self.norm
    }

    /// `|v - center|` in the ball's norm.
    pub fn distance_from_center(&self, v: &DVector<f64>) -> Result<f64> {
        self.norm.value(&(v - &self.center))
    }

    /// Membership up to [`MEMBERSHIP_TOL`] on the norm value.
    pub fn contains(&self, v: &DVector<f64>) -> Result<bool> {
        Ok(self.distance_from_center(v)? <= self.radius + MEMBERSHIP_TOL)
    }
}

/// Residual of the normal-cone inclusion `g in N_B(u)`:
/// `max(0, radius * |g|_dual - <g, u - center>)`.
///
/// Zero iff `g` lies in the normal cone of the ball at `u` (up to tolerance).
/// `u` outside the ball beyond 1e-9 is an argument error.
pub fn normal_cone_violation(ball: &Ball, u: &DVector<f64>, g: &DVector<f64>) -> Result<f64> {
    let dist = ball.distance_from_center(u)?;
    if dist - ball.radius() > OUTSIDE_TOL {
        return Err(Error::invalid(format!(
            "point lies outside the ball: |u - center| = {dist}, radius = {}",
            ball.radius()
        )));
    }
    let dual = ball.norm().dual_value(g)?;
    let inner = g.dot(&(u - ball.center()));
    Ok((ball.radius() * dual - inner).max(0.0))
}

//! Brute-force grid oracle for low-dimensional cross-validation.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::geometry::Ball;
use crate::problems::Objective;

/// Evaluates `f` on a regular grid over the ball's bounding box at the given
/// spacing, filters by ball membership, and returns the grid argmin. Only
/// dimensions up to 3 are supported.
pub fn brox_bruteforce(f: &Objective, ball: &Ball, resolution: f64) -> Result<DVector<f64>> {
    let d = ball.norm().dim();
    if d > 3 {
        return Err(Error::UnsupportedDimension {
            dim: d,
            reason: "grid oracle supports at most 3 dimensions".to_string(),
        });
    }
    if !(resolution > 0.0) {
        return Err(Error::invalid(format!(
            "grid resolution must be positive, got {resolution}"
        )));
    }
    if f.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, got: f.dim() });
    }

    let extents = ball.norm().unit_extents() * ball.radius();
    let counts: Vec<usize> = (0..d)
        .map(|i| (2.0 * extents[i] / resolution).floor() as usize + 1)
        .collect();

    let mut best_value = f64::INFINITY;
    let mut best_point: Option<DVector<f64>> = None;
    let mut idx = vec![0usize; d];
    let mut point = DVector::zeros(d);
    loop {
        for i in 0..d {
            point[i] = ball.center()[i] - extents[i] + idx[i] as f64 * resolution;
        }
        if ball.contains(&point)? {
            let v = f.value(&point);
            if v < best_value {
                best_value = v;
                best_point = Some(point.clone());
            }
        }
        // odometer increment over the grid indices
        let mut carry = true;
        for i in 0..d {
            if carry {
                idx[i] += 1;
                if idx[i] >= counts[i] {
                    idx[i] = 0;
                } else {
                    carry = false;
                }
            }
        }
        if carry {
            break;
        }
    }

    best_point.ok_or_else(|| {
        Error::numeric("no grid point fell inside the ball; resolution too coarse")
    })
}

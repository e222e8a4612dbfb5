//! Fixed-volume ellipsoid norm design.
//!
//! Given a start point, a target point and a volume budget, builds a
//! Mahalanobis norm whose ball centered at the start point has exactly the
//! requested volume and whose boundary passes through the target point.
//! Stretching happens along the start-to-target direction only.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// The designed norm matrix together with the radius at which the target
/// point sits on the ball boundary.
#[derive(Clone, Debug)]
pub struct DesignedEllipsoid {
    pub matrix: DMatrix<f64>,
    pub radius: f64,
}

/// Volume of the d-dimensional Euclidean unit ball, via the recurrence
/// `v_d = 2 pi v_{d-2} / d` with `v_0 = 1`, `v_1 = 2`.
pub fn unit_ball_volume(d: usize) -> f64 {
    match d {
        0 => 1.0,
        1 => 2.0,
        _ => 2.0 * std::f64::consts::PI * unit_ball_volume(d - 2) / d as f64,
    }
}

/// Builds `X = c1 P + (I - P)` with `P` the rank-one projector onto
/// `x0 - x_star` and `c1 = (V / (|x0 - x_star|_2^d vol(B_2(0,1))))^(2/(d-1))`,
/// so that the ball `{ z : |z - x0|_X <= |x0 - x_star|_X }` has volume `V`
/// and `x_star` lies on its boundary.
pub fn design_ellipsoid(
    x0: &DVector<f64>,
    x_star: &DVector<f64>,
    volume: f64,
) -> Result<DesignedEllipsoid> {
    let d = x0.len();
    if x_star.len() != d {
        return Err(Error::DimensionMismatch { expected: d, got: x_star.len() });
    }
    if d < 2 {
        return Err(Error::UnsupportedDimension {
            dim: d,
            reason: "the stretch exponent 2/(d-1) is undefined for d = 1".to_string(),
        });
    }
    if !(volume > 0.0) {
        return Err(Error::invalid(format!("volume must be positive, got {volume}")));
    }
    let w = x0 - x_star;
    let wn = w.norm();
    if wn == 0.0 {
        return Err(Error::invalid("x0 and x_star must be distinct"));
    }
    let c1 = (volume / (wn.powi(d as i32) * unit_ball_volume(d))).powf(2.0 / (d as f64 - 1.0));
    let p = &w * w.transpose() / (wn * wn);
    let mut x = DMatrix::identity(d, d) + (c1 - 1.0) * p;
    // exact symmetry for downstream factorizations
    for i in 0..d {
        for j in (i + 1)..d {
            let avg = 0.5 * (x[(i, j)] + x[(j, i)]);
            x[(i, j)] = avg;
            x[(j, i)] = avg;
        }
    }
    let radius = c1.sqrt() * wn;
    Ok(DesignedEllipsoid { matrix: x, radius })
}

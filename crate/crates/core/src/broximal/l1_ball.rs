//! Projected gradient descent over l1 balls, with the exact sort-based
//! projection.

use nalgebra::DVector;

use super::{boundary_flag, BroxPath, BroxSolution};
use crate::error::{Error, Result};
use crate::geometry::{normal_cone_violation, Ball, NormDescriptor};
use crate::problems::QuadraticObjective;

const MAX_ITERS: usize = 100_000;

/// Euclidean projection of `v` onto `{ z : |z - center|_1 <= radius }`.
///
/// Sort-based threshold search on the shifted absolute values; exact up to
/// floating-point rounding.
pub fn project_onto_l1_ball(v: &DVector<f64>, center: &DVector<f64>, radius: f64) -> DVector<f64> {
    let w = v - center;
    let l1: f64 = w.iter().map(|x| x.abs()).sum();
    if l1 <= radius {
        return v.clone();
    }
    let mut mags: Vec<f64> = w.iter().map(|x| x.abs()).collect();
    mags.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (j, m) in mags.iter().enumerate() {
        cumsum += m;
        let candidate = (cumsum - radius) / (j as f64 + 1.0);
        if m - candidate > 0.0 {
            theta = candidate;
        } else {
            break;
        }
    }
    center + w.map(|x| x.signum() * (x.abs() - theta).max(0.0))
}

/// Minimizes a quadratic over the l1 ball by projected gradient descent with
/// stepsize `1 / lambda_max(A)`; stops when successive iterates are within
/// `tol * t` in l2.
pub fn brox_l1_quadratic(
    q: &QuadraticObjective,
    center: &DVector<f64>,
    t: f64,
    tol: f64,
) -> Result<BroxSolution> {
    if !(t > 0.0) {
        return Err(Error::invalid(format!("radius must be positive, got {t}")));
    }
    if !(tol > 0.0) {
        return Err(Error::invalid(format!("tolerance must be positive, got {tol}")));
    }
    let d = q.dim();
    if center.len() != d {
        return Err(Error::DimensionMismatch { expected: d, got: center.len() });
    }
    let step = 1.0 / q.lambda_max();
    let mut x = project_onto_l1_ball(q.x_star(), center, t);
    let mut iterations = 0usize;
    loop {
        iterations += 1;
        if iterations > MAX_ITERS {
            return Err(Error::Convergence {
                context: "l1-ball projected gradient descent".to_string(),
                iterations: MAX_ITERS,
            });
        }
        let next = project_onto_l1_ball(&(&x - step * q.gradient(&x)), center, t);
        let moved = (&next - &x).norm();
        x = next;
        if moved <= tol * t {
            break;
        }
    }

    let norm = NormDescriptor::l1(d);
    let dist = norm.value(&(&x - center))?;
    let ball = Ball::new(center.clone(), t, norm)?;
    let g = -q.gradient(&x);
    let residual = normal_cone_violation(&ball, &x, &g)?;
    Ok(BroxSolution {
        stationarity_residual: residual,
        inner_iterations: iterations,
        on_boundary: boundary_flag(dist, t),
        path: BroxPath::L1Projected,
        point: x,
    })
}

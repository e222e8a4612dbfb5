//! Conditional-gradient inner solver for arbitrary objective/ball pairs.

use super::{boundary_flag, BroxPath, BroxSolution};
use crate::error::{Error, Result};
use crate::geometry::Ball;
use crate::problems::Objective;

/// Classical Frank-Wolfe loop started at the ball center. The vertex step is
/// `center + radius * lmo(grad)`; quadratic-form objectives use exact line
/// search, everything else the 2/(j+2) schedule. Stops when the duality gap
/// `<grad, z - s>` drops to `gap_tol`. On budget exhaustion the best iterate
/// seen is returned with its gap recorded; no error is raised.
pub fn brox_frank_wolfe(
    f: &Objective,
    ball: &Ball,
    max_iters: usize,
    gap_tol: f64,
) -> Result<BroxSolution> {
    if max_iters < 1 {
        return Err(Error::invalid("frank-wolfe needs at least one iteration"));
    }
    if f.dim() != ball.norm().dim() {
        return Err(Error::DimensionMismatch { expected: ball.norm().dim(), got: f.dim() });
    }
    let mut z = ball.center().clone();
    let mut best_point = z.clone();
    let mut best_value = f.value(&z);
    let mut best_gap = f64::INFINITY;
    let mut iterations = 0usize;

    for j in 0..max_iters {
        iterations = j + 1;
        let grad = f.gradient(&z);
        let u = ball.norm().lmo(&grad)?;
        let s = ball.center() + ball.radius() * u;
        let dir = &s - &z;
        let gap = -grad.dot(&dir);

        let value = f.value(&z);
        if value < best_value || (value == best_value && gap < best_gap) {
            best_value = value;
            best_point = z.clone();
            best_gap = gap;
        }
        if gap <= gap_tol {
            best_point = z;
            best_gap = gap;
            break;
        }

        let eta = match f.curvature_along(&dir) {
            Some(curv) if curv > 0.0 => (gap / curv).min(1.0),
            Some(_) => 1.0,
            None => 2.0 / (j as f64 + 2.0),
        };
        z += eta * dir;
    }

    let dist = ball.distance_from_center(&best_point)?;
    Ok(BroxSolution {
        stationarity_residual: best_gap.max(0.0),
        inner_iterations: iterations,
        on_boundary: boundary_flag(dist, ball.radius()),
        path: BroxPath::FrankWolfe,
        point: best_point,
    })
}

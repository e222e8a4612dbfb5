//! Box-constrained quadratic minimization by cyclic exact coordinate
//! descent with clipping, used for linf balls.

use nalgebra::DVector;

use super::{boundary_flag, BroxPath, BroxSolution};
use crate::error::{Error, Result};
use crate::problems::QuadraticObjective;

const MAX_SWEEPS: usize = 100_000;

/// Minimizes a quadratic over `[center - t, center + t]^d`. Each coordinate
/// is minimized exactly and clipped to the box; a sweep terminates the loop
/// once its largest coordinate change is at most `tol * t`.
pub fn brox_box_quadratic(
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
    let a = q.matrix();
    let lo = center.map(|c| c - t);
    let hi = center.map(|c| c + t);

    let clip = |v: f64, i: usize| v.max(lo[i]).min(hi[i]);

    let mut x = DVector::from_fn(d, |i, _| clip(q.x_star()[i], i));
    let mut grad = q.gradient(&x);
    let mut sweeps = 0usize;

    loop {
        sweeps += 1;
        if sweeps > MAX_SWEEPS {
            return Err(Error::Convergence {
                context: "box coordinate descent".to_string(),
                iterations: MAX_SWEEPS,
            });
        }
        let mut max_change = 0.0_f64;
        for i in 0..d {
            let target = clip(x[i] - grad[i] / a[(i, i)], i);
            let delta = target - x[i];
            if delta != 0.0 {
                x[i] = target;
                grad += delta * a.column(i);
                max_change = max_change.max(delta.abs());
            }
        }
        if max_change <= tol * t {
            break;
        }
    }

    // projected-gradient residual: |x - clip(x - grad)|_2
    let pg = DVector::from_fn(d, |i, _| x[i] - clip(x[i] - grad[i], i));
    let dist = (&x - center).amax();
    Ok(BroxSolution {
        stationarity_residual: pg.norm(),
        inner_iterations: sweeps,
        on_boundary: boundary_flag(dist, t),
        path: BroxPath::BoxCoordinate,
        point: x,
    })
}

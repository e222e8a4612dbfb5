//! Linear minimization oracles over unit norm balls.

use nalgebra::{DMatrix, DVector};

use super::{as_matrix, as_vector, conjugate_exponent, NormDescriptor, NormKind, SV_RANK_CUTOFF};
use crate::error::{Error, Result};

impl NormDescriptor {
    /// Minimizer of `<g, z>` over the unit ball of this norm, so that
    /// `<g, lmo(g)> = -dual_value(g)`.
    ///
    /// `g = 0` returns the zero vector: any ball point minimizes a zero
    /// linear form, and callers treat it as "already stationary".
    ///
    /// Tie-breaking is deterministic: the l1 oracle picks the smallest index
    /// among coordinates attaining `max |g_i|`, and the spectral oracle uses
    /// the reduced SVD of numerical rank (singular values above
    /// `1e-12 * sigma_max`).
    pub fn lmo(&self, g: &DVector<f64>) -> Result<DVector<f64>> {
        if g.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: g.len(),
            });
        }
        if g.iter().all(|x| *x == 0.0) {
            return Ok(DVector::zeros(self.dim()));
        }
        match self.kind() {
            NormKind::L1 => {
                let mut imax = 0;
                let mut best = f64::NEG_INFINITY;
                for (i, gi) in g.iter().enumerate() {
                    if gi.abs() > best {
                        best = gi.abs();
                        imax = i;
                    }
                }
                let mut out = DVector::zeros(self.dim());
                out[imax] = -g[imax].signum();
                Ok(out)
            }
            NormKind::L2 => Ok(-g / g.norm()),
            NormKind::LInf => Ok(g.map(|x| {
                if x > 0.0 {
                    -1.0
                } else if x < 0.0 {
                    1.0
                } else {
                    0.0
                }
            })),
            NormKind::Lp(p) => {
                let q = conjugate_exponent(*p);
                // (|g_i| / |g|_q)^(q-1), evaluated on ratios <= 1 so large q stays stable
                let m = g.amax();
                let s: f64 = g.iter().map(|x| (x.abs() / m).powf(q)).sum();
                let qnorm = m * s.powf(1.0 / q);
                Ok(g.map(|x| -x.signum() * (x.abs() / qnorm).powf(q - 1.0)))
            }
            NormKind::Ellipsoid(e) => {
                let w = e.solve(g);
                let dual = w.dot(g).max(0.0).sqrt();
                Ok(-w / dual)
            }
            NormKind::Spectral { rows, cols } => {
                let m = as_matrix(g, *rows, *cols)?;
                let svd = nalgebra::SVD::try_new(m, true, true, f64::EPSILON, 0)
                    .ok_or_else(|| Error::numeric("SVD did not converge"))?;
                let u = svd.u.as_ref().expect("u requested");
                let v_t = svd.v_t.as_ref().expect("v_t requested");
                let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
                let mut out = DMatrix::zeros(*rows, *cols);
                for (i, s) in svd.singular_values.iter().enumerate() {
                    if *s > SV_RANK_CUTOFF * smax {
                        out -= u.column(i) * v_t.row(i);
                    }
                }
                Ok(as_vector(&out))
            }
        }
    }
}

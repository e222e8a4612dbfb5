//! Norm geometry: primal and dual norms, unit-ball linear minimization
//! oracles, ball membership and normal-cone residuals, and fixed-volume
//! ellipsoid norm design.
//!
//! A [`NormDescriptor`] fixes the norm that defines the ball geometry.
//! Vectors measured under a `Spectral` norm are interpreted as `rows x cols`
//! matrices stored in row-major order; this layout is fixed and shared by
//! every operation and file format in the crate.

mod ball;
mod ellipsoid;
mod lmo;

pub use ball::{normal_cone_violation, Ball, MEMBERSHIP_TOL};
pub use ellipsoid::{design_ellipsoid, unit_ball_volume, DesignedEllipsoid};

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::error::{Error, Result};

/// Relative cutoff below which singular values are treated as zero.
pub const SV_RANK_CUTOFF: f64 = 1e-12;

/// A symmetric positive definite matrix together with its Cholesky factor,
/// defining the norm `sqrt(v' X v)`.
#[derive(Clone, Debug)]
pub struct EllipsoidNorm {
    matrix: DMatrix<f64>,
    chol: Cholesky<f64, Dyn>,
}

impl EllipsoidNorm {
    /// Validates symmetry entrywise (1e-12 scaled) and positive definiteness
    /// via Cholesky factorization.
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        let d = matrix.nrows();
        if matrix.ncols() != d || d == 0 {
            return Err(Error::invalid(format!(
                "ellipsoid matrix must be square and non-empty, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let scale = 1.0 + matrix.amax();
        for i in 0..d {
            for j in (i + 1)..d {
                if (matrix[(i, j)] - matrix[(j, i)]).abs() > 1e-12 * scale {
                    return Err(Error::invalid(
                        "ellipsoid matrix is not symmetric".to_string(),
                    ));
                }
            }
        }
        let chol = Cholesky::new(matrix.clone())
            .ok_or_else(|| Error::invalid("ellipsoid matrix is not positive definite"))?;
        Ok(Self { matrix, chol })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Lower-triangular factor `L` with `X = L L'`.
    pub fn factor(&self) -> DMatrix<f64> {
        self.chol.l()
    }

    /// `X^{-1} v` via the cached factorization.
    pub fn solve(&self, v: &DVector<f64>) -> DVector<f64> {
        self.chol.solve(v)
    }

    /// Dense `X^{-1}`.
    pub fn inverse_matrix(&self) -> DMatrix<f64> {
        self.chol.inverse()
    }

    /// `sqrt(v' X v)` computed as the Euclidean norm of `L' v`.
    pub fn norm(&self, v: &DVector<f64>) -> f64 {
        (self.chol.l().transpose() * v).norm()
    }

    /// `sqrt(v' X^{-1} v)`.
    pub fn dual_norm(&self, v: &DVector<f64>) -> f64 {
        self.solve(v).dot(v).max(0.0).sqrt()
    }
}

/// Norm family tag, together with any parameters the norm needs.
#[derive(Clone, Debug)]
pub enum NormKind {
    L1,
    L2,
    LInf,
    /// Requires `1 < p < inf`; `p = 1` and `p = inf` are the dedicated variants.
    Lp(f64),
    Ellipsoid(EllipsoidNorm),
    /// Largest singular value of the row-major `rows x cols` reshaping.
    Spectral { rows: usize, cols: usize },
}

/// A norm on `R^d`.
#[derive(Clone, Debug)]
pub struct NormDescriptor {
    kind: NormKind,
    dim: usize,
}

impl NormDescriptor {
    pub fn l1(dim: usize) -> Self {
        Self { kind: NormKind::L1, dim }
    }

    pub fn l2(dim: usize) -> Self {
        Self { kind: NormKind::L2, dim }
    }

    pub fn linf(dim: usize) -> Self {
        Self { kind: NormKind::LInf, dim }
    }

    pub fn lp(dim: usize, p: f64) -> Result<Self> {
        if !(p > 1.0 && p.is_finite()) {
            return Err(Error::invalid(format!(
                "lp norm requires 1 < p < inf, got p = {p}"
            )));
        }
        Ok(Self { kind: NormKind::Lp(p), dim })
    }

    pub fn ellipsoid(matrix: DMatrix<f64>) -> Result<Self> {
        let e = EllipsoidNorm::new(matrix)?;
        let dim = e.dim();
        Ok(Self { kind: NormKind::Ellipsoid(e), dim })
    }

    pub fn spectral(rows: usize, cols: usize) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::invalid("spectral norm requires positive rows and cols"));
        }
        Ok(Self {
            kind: NormKind::Spectral { rows, cols },
            dim: rows * cols,
        })
    }

    pub fn kind(&self) -> &NormKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Whether the norm is induced by an inner product (L2 or ellipsoid).
    /// Only these geometries admit the squared-distance recursion.
    pub fn is_inner_product(&self) -> bool {
        matches!(self.kind, NormKind::L2 | NormKind::Ellipsoid(_))
    }

    fn check_dim(&self, v: &DVector<f64>) -> Result<()> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: v.len(),
            });
        }
        Ok(())
    }

    /// The norm of `v`.
    pub fn value(&self, v: &DVector<f64>) -> Result<f64> {
        self.check_dim(v)?;
        match &self.kind {
            NormKind::L1 => Ok(v.iter().map(|x| x.abs()).sum()),
            NormKind::L2 => Ok(v.norm()),
            NormKind::LInf => Ok(v.amax()),
            NormKind::Lp(p) => Ok(lp_norm(v, *p)),
            NormKind::Ellipsoid(e) => Ok(e.norm(v)),
            NormKind::Spectral { rows, cols } => {
                let sv = singular_values(v, *rows, *cols)?;
                Ok(sv.iter().cloned().fold(0.0, f64::max))
            }
        }
    }

    /// The dual norm `sup { <v, z> : |z| <= 1 }`: L1 <-> Linf, Lp <-> Lq with
    /// 1/p + 1/q = 1, ellipsoid(X) <-> ellipsoid(X^{-1}), spectral <-> nuclear,
    /// and L2 is self-dual.
    pub fn dual_value(&self, v: &DVector<f64>) -> Result<f64> {
        self.check_dim(v)?;
        match &self.kind {
            NormKind::L1 => Ok(v.amax()),
            NormKind::L2 => Ok(v.norm()),
            NormKind::LInf => Ok(v.iter().map(|x| x.abs()).sum()),
            NormKind::Lp(p) => Ok(lp_norm(v, conjugate_exponent(*p))),
            NormKind::Ellipsoid(e) => Ok(e.dual_norm(v)),
            NormKind::Spectral { rows, cols } => {
                let sv = singular_values(v, *rows, *cols)?;
                Ok(sv.iter().sum())
            }
        }
    }

    /// Descriptor of the dual norm, when it belongs to the same family set.
    /// The dual of the spectral norm (nuclear) is not representable and
    /// returns `None`.
    pub fn dual_descriptor(&self) -> Option<NormDescriptor> {
        match &self.kind {
            NormKind::L1 => Some(NormDescriptor::linf(self.dim)),
            NormKind::L2 => Some(NormDescriptor::l2(self.dim)),
            NormKind::LInf => Some(NormDescriptor::l1(self.dim)),
            NormKind::Lp(p) => NormDescriptor::lp(self.dim, conjugate_exponent(*p)).ok(),
            NormKind::Ellipsoid(e) => NormDescriptor::ellipsoid(e.inverse_matrix()).ok(),
            NormKind::Spectral { .. } => None,
        }
    }

    /// Short name used in reports and CSV output.
    pub fn family_name(&self) -> String {
        match &self.kind {
            NormKind::L1 => "l1".to_string(),
            NormKind::L2 => "l2".to_string(),
            NormKind::LInf => "linf".to_string(),
            NormKind::Lp(p) => format!("lp:{p}"),
            NormKind::Ellipsoid(_) => "ellipsoid".to_string(),
            NormKind::Spectral { rows, cols } => format!("spectral:{rows}x{cols}"),
        }
    }

    /// Half-extent of the unit ball along each coordinate axis. Used to
    /// bound grid scans.
    pub fn unit_extents(&self) -> DVector<f64> {
        match &self.kind {
            NormKind::Ellipsoid(e) => {
                let inv = e.inverse_matrix();
                DVector::from_iterator(self.dim, (0..self.dim).map(|i| inv[(i, i)].max(0.0).sqrt()))
            }
            _ => DVector::from_element(self.dim, 1.0),
        }
    }
}

pub(crate) fn conjugate_exponent(p: f64) -> f64 {
    p / (p - 1.0)
}

/// `(sum |v_i|^p)^(1/p)` with max-abs scaling to avoid overflow for large `p`.
fn lp_norm(v: &DVector<f64>, p: f64) -> f64 {
    let m = v.amax();
    if m == 0.0 {
        return 0.0;
    }
    let s: f64 = v.iter().map(|x| (x.abs() / m).powf(p)).sum();
    m * s.powf(1.0 / p)
}

/// Row-major reshaping of a flat vector into a `rows x cols` matrix.
pub fn as_matrix(v: &DVector<f64>, rows: usize, cols: usize) -> Result<DMatrix<f64>> {
    if v.len() != rows * cols {
        return Err(Error::DimensionMismatch {
            expected: rows * cols,
            got: v.len(),
        });
    }
    Ok(DMatrix::from_row_slice(rows, cols, v.as_slice()))
}

/// Row-major flattening, the inverse of [`as_matrix`].
pub fn as_vector(m: &DMatrix<f64>) -> DVector<f64> {
    let (rows, cols) = m.shape();
    DVector::from_iterator(rows * cols, (0..rows).flat_map(|i| (0..cols).map(move |j| (i, j))).map(|(i, j)| m[(i, j)]))
}

fn singular_values(v: &DVector<f64>, rows: usize, cols: usize) -> Result<Vec<f64>> {
    let m = as_matrix(v, rows, cols)?;
    let svd = nalgebra::SVD::try_new(m, false, false, f64::EPSILON, 0)
        .ok_or_else(|| Error::numeric("SVD did not converge"))?;
    Ok(svd.singular_values.iter().cloned().collect())
}

//! Convex test objectives with exact gradients and, where available, known
//! minimizers and optimal values.
//!
//! Every objective here is finite-valued on all of `R^d`; constraints enter
//! only through the ball in the outer method.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Known minimizer and optimal value.
#[derive(Clone, Debug)]
pub struct KnownOptimum {
    pub x_star: DVector<f64>,
    pub f_star: f64,
}

/// `f(x) = (1/2) (x - x*)' A (x - x*) + f*` with `A` symmetric positive
/// definite.
#[derive(Clone, Debug)]
pub struct QuadraticObjective {
    a: DMatrix<f64>,
    x_star: DVector<f64>,
    f_star: f64,
    lambda_max: f64,
    lambda_min: f64,
}

impl QuadraticObjective {
    pub fn new(a: DMatrix<f64>, x_star: DVector<f64>, f_star: f64) -> Result<Self> {
        let d = a.nrows();
        if a.ncols() != d || x_star.len() != d || d == 0 {
            return Err(Error::invalid("quadratic matrix/minimizer shape mismatch"));
        }
        let scale = 1.0 + a.amax();
        for i in 0..d {
            for j in (i + 1)..d {
                if (a[(i, j)] - a[(j, i)]).abs() > 1e-12 * scale {
                    return Err(Error::invalid("quadratic matrix is not symmetric"));
                }
            }
        }
        let eig = a.clone().symmetric_eigen();
        let lambda_min = eig.eigenvalues.min();
        let lambda_max = eig.eigenvalues.max();
        if lambda_min <= 0.0 {
            return Err(Error::invalid(format!(
                "quadratic matrix must be positive definite, smallest eigenvalue {lambda_min}"
            )));
        }
        Ok(Self { a, x_star, f_star, lambda_max, lambda_min })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn x_star(&self) -> &DVector<f64> {
        &self.x_star
    }

    pub fn f_star(&self) -> f64 {
        self.f_star
    }

    pub fn lambda_max(&self) -> f64 {
        self.lambda_max
    }

    pub fn lambda_min(&self) -> f64 {
        self.lambda_min
    }

    pub fn value(&self, x: &DVector<f64>) -> f64 {
        let r = x - &self.x_star;
        0.5 * (&self.a * &r).dot(&r) + self.f_star
    }

    pub fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.a * (x - &self.x_star)
    }

    pub fn dim(&self) -> usize {
        self.a.nrows()
    }
}

/// Seeded random orthogonal matrix: QR of a Gaussian matrix with the sign
/// convention that makes R's diagonal nonnegative.
fn seeded_orthogonal(d: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gauss = DMatrix::from_fn(d, d, |_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = gauss.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..d {
        if r[(j, j)] < 0.0 {
            for i in 0..d {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    q
}

/// Builds `A = Q' diag(eigenvalues) Q` with a seeded random rotation;
/// deterministic per seed.
pub fn make_quadratic(
    eigenvalues: &[f64],
    rotation_seed: u64,
    x_star: DVector<f64>,
    f_star: f64,
) -> Result<QuadraticObjective> {
    if eigenvalues.is_empty() {
        return Err(Error::invalid("eigenvalue list must be non-empty"));
    }
    if let Some(bad) = eigenvalues.iter().find(|l| !(**l > 0.0)) {
        return Err(Error::invalid(format!("eigenvalues must be positive, got {bad}")));
    }
    let d = eigenvalues.len();
    if x_star.len() != d {
        return Err(Error::DimensionMismatch { expected: d, got: x_star.len() });
    }
    let q = seeded_orthogonal(d, rotation_seed);
    let lambda = DMatrix::from_diagonal(&DVector::from_column_slice(eigenvalues));
    let mut a = q.transpose() * lambda * &q;
    for i in 0..d {
        for j in (i + 1)..d {
            let avg = 0.5 * (a[(i, j)] + a[(j, i)]);
            a[(i, j)] = avg;
            a[(j, i)] = avg;
        }
    }
    QuadraticObjective::new(a, x_star, f_star)
}

/// `f(x) = (1/2) |M x - y|_2^2`.
#[derive(Clone, Debug)]
pub struct LeastSquaresObjective {
    m: DMatrix<f64>,
    y: DVector<f64>,
    optimum: Option<KnownOptimum>,
}

impl LeastSquaresObjective {
    pub fn value(&self, x: &DVector<f64>) -> f64 {
        let r = &self.m * x - &self.y;
        0.5 * r.norm_squared()
    }

    pub fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        self.m.transpose() * (&self.m * x - &self.y)
    }

    pub fn dim(&self) -> usize {
        self.m.ncols()
    }

    pub fn design_matrix(&self) -> &DMatrix<f64> {
        &self.m
    }
}

/// Least-squares objective; the optimum is filled in via a normal-equations
/// solve when `M'M` is nonsingular and left absent otherwise.
pub fn make_least_squares(m: DMatrix<f64>, y: DVector<f64>) -> Result<Objective> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Err(Error::invalid("least squares requires a non-empty matrix"));
    }
    if y.len() != m.nrows() {
        return Err(Error::DimensionMismatch { expected: m.nrows(), got: y.len() });
    }
    let gram = m.transpose() * &m;
    let rhs = m.transpose() * &y;
    let optimum = nalgebra::Cholesky::new(gram).map(|ch| {
        let x_star = ch.solve(&rhs);
        let f_star = {
            let r = &m * &x_star - &y;
            0.5 * r.norm_squared()
        };
        KnownOptimum { x_star, f_star }
    });
    Ok(Objective::LeastSquares(LeastSquaresObjective { m, y, optimum }))
}

/// `f(x) = (1/n) sum log(1 + exp(-l_i <m_i, x>)) + (ridge/2) |x|_2^2`.
#[derive(Clone, Debug)]
pub struct LogisticObjective {
    features: DMatrix<f64>,
    labels: DVector<f64>,
    ridge: f64,
    optimum: Option<KnownOptimum>,
}

/// Numerically stable `log(1 + exp(t))`.
fn log1p_exp(t: f64) -> f64 {
    if t > 0.0 {
        t + (-t).exp().ln_1p()
    } else {
        t.exp().ln_1p()
    }
}

/// Logistic sigmoid `1 / (1 + exp(-t))`.
fn sigmoid(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

impl LogisticObjective {
    pub fn value(&self, x: &DVector<f64>) -> f64 {
        let n = self.features.nrows() as f64;
        let margins = &self.features * x;
        let loss: f64 = margins
            .iter()
            .zip(self.labels.iter())
            .map(|(m, l)| log1p_exp(-l * m))
            .sum();
        loss / n + 0.5 * self.ridge * x.norm_squared()
    }

    pub fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        let n = self.features.nrows() as f64;
        let margins = &self.features * x;
        let mut g = DVector::zeros(x.len());
        for i in 0..self.features.nrows() {
            let l = self.labels[i];
            let w = sigmoid(-l * margins[i]);
            g.axpy(-l * w / n, &self.features.row(i).transpose(), 1.0);
        }
        g + self.ridge * x
    }

    pub fn dim(&self) -> usize {
        self.features.ncols()
    }

    pub fn ridge(&self) -> f64 {
        self.ridge
    }
}

/// Logistic objective. For `ridge > 0` the optimum is computed by gradient
/// descent with stepsize `1/L` down to gradient norm 1e-12.
pub fn make_logistic(features: DMatrix<f64>, labels: &[f64], ridge: f64) -> Result<Objective> {
    if features.nrows() == 0 || features.ncols() == 0 {
        return Err(Error::invalid("logistic requires a non-empty feature matrix"));
    }
    if labels.len() != features.nrows() {
        return Err(Error::DimensionMismatch {
            expected: features.nrows(),
            got: labels.len(),
        });
    }
    if let Some(bad) = labels.iter().find(|l| **l != 1.0 && **l != -1.0) {
        return Err(Error::invalid(format!("labels must be +1 or -1, got {bad}")));
    }
    if !(ridge >= 0.0) {
        return Err(Error::invalid(format!("ridge must be nonnegative, got {ridge}")));
    }
    let mut obj = LogisticObjective {
        labels: DVector::from_column_slice(labels),
        features,
        ridge,
        optimum: None,
    };
    if ridge > 0.0 {
        let optimum = solve_logistic_optimum(&obj)?;
        obj.optimum = Some(optimum);
    }
    Ok(Objective::Logistic(obj))
}

fn solve_logistic_optimum(obj: &LogisticObjective) -> Result<KnownOptimum> {
    let n = obj.features.nrows() as f64;
    // curvature bound: lambda_max(M'M) / (4n) + ridge
    let gram = obj.features.transpose() * &obj.features;
    let lip = gram.symmetric_eigen().eigenvalues.max() / (4.0 * n) + obj.ridge;
    let step = 1.0 / lip;
    let mut x = DVector::zeros(obj.dim());
    let max_iters = 2_000_000;
    for _ in 0..max_iters {
        let g = obj.gradient(&x);
        if g.norm() <= 1e-12 {
            return Ok(KnownOptimum { f_star: obj.value(&x), x_star: x });
        }
        x -= step * g;
    }
    Err(Error::Convergence {
        context: "logistic optimum solve".to_string(),
        iterations: max_iters,
    })
}

/// A convex objective the outer methods can evaluate and differentiate.
#[derive(Clone, Debug)]
pub enum Objective {
    Quadratic(QuadraticObjective),
    LeastSquares(LeastSquaresObjective),
    Logistic(LogisticObjective),
}

impl Objective {
    pub fn value(&self, x: &DVector<f64>) -> f64 {
        match self {
            Objective::Quadratic(q) => q.value(x),
            Objective::LeastSquares(l) => l.value(x),
            Objective::Logistic(l) => l.value(x),
        }
    }

    pub fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        match self {
            Objective::Quadratic(q) => q.gradient(x),
            Objective::LeastSquares(l) => l.gradient(x),
            Objective::Logistic(l) => l.gradient(x),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Objective::Quadratic(q) => q.dim(),
            Objective::LeastSquares(l) => l.dim(),
            Objective::Logistic(l) => l.dim(),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Objective::Quadratic(_) => "quadratic",
            Objective::LeastSquares(_) => "least_squares",
            Objective::Logistic(_) => "logistic",
        }
    }

    pub fn known_optimum(&self) -> Option<KnownOptimum> {
        match self {
            Objective::Quadratic(q) => Some(KnownOptimum {
                x_star: q.x_star.clone(),
                f_star: q.f_star,
            }),
            Objective::LeastSquares(l) => l.optimum.clone(),
            Objective::Logistic(l) => l.optimum.clone(),
        }
    }

    /// Exact curvature `d' H d` when the objective is a quadratic form,
    /// enabling exact line searches.
    pub fn curvature_along(&self, d: &DVector<f64>) -> Option<f64> {
        match self {
            Objective::Quadratic(q) => Some((&q.a * d).dot(d)),
            Objective::LeastSquares(l) => Some((&l.m * d).norm_squared()),
            Objective::Logistic(_) => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dvector;

    /// Central finite differences with step 1e-5.
    pub fn fd_gradient(f: &dyn Fn(&DVector<f64>) -> f64, x: &DVector<f64>) -> DVector<f64> {
        let h = 1e-5;
        DVector::from_fn(x.len(), |i, _| {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[i] += h;
            xm[i] -= h;
            (f(&xp) - f(&xm)) / (2.0 * h)
        })
    }

    fn seeded_point(d: usize, seed: u64) -> DVector<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        DVector::from_fn(d, |_, _| rng.random_range(-2.0..2.0))
    }

    #[test]
    fn isotropic_quadratic_value() {
        let q = make_quadratic(&[1.0, 1.0], 42, dvector![0.0, 0.0], 0.0).unwrap();
        assert!((q.value(&dvector![2.0, 0.0]) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn quadratic_gradient_matches_definition() {
        let q = make_quadratic(&[1.0, 100.0], 0, dvector![0.0, 0.0], 0.0).unwrap();
        for seed in 0..5 {
            let x = seeded_point(2, seed);
            let expect = q.matrix() * &x;
            assert!((q.gradient(&x) - expect).amax() < 1e-12);
        }
    }

    #[test]
    fn quadratic_gradient_matches_finite_differences() {
        let q = make_quadratic(&[1.0, 100.0], 0, dvector![0.0, 0.0], 0.0).unwrap();
        for seed in 10..15 {
            let x = seeded_point(2, seed);
            let fd = fd_gradient(&|z| q.value(z), &x);
            let g = q.gradient(&x);
            assert!((&g - &fd).norm() <= 1e-5 * (1.0 + g.norm()));
        }
    }

    #[test]
    fn quadratic_value_reproduces_the_closed_form() {
        let q = make_quadratic(&[0.7, 12.0], 6, dvector![0.5, -1.0], 2.5).unwrap();
        for seed in 0..10 {
            let x = seeded_point(2, seed);
            let r = &x - q.x_star();
            let direct = 0.5 * (q.matrix() * &r).dot(&r);
            let via_value = q.value(&x) - q.f_star();
            assert!((via_value - direct).abs() <= 1e-12 * (1.0 + direct.abs()));
        }
    }

    #[test]
    fn quadratic_rejects_nonpositive_eigenvalues() {
        assert!(make_quadratic(&[1.0, 0.0], 0, dvector![0.0, 0.0], 0.0).is_err());
        assert!(make_quadratic(&[1.0, -2.0], 0, dvector![0.0, 0.0], 0.0).is_err());
    }

    #[test]
    fn make_quadratic_is_deterministic_per_seed() {
        let a = make_quadratic(&[1.0, 7.0], 9, dvector![0.0, 0.0], 0.0).unwrap();
        let b = make_quadratic(&[1.0, 7.0], 9, dvector![0.0, 0.0], 0.0).unwrap();
        assert_eq!(a.matrix(), b.matrix());
        let c = make_quadratic(&[1.0, 7.0], 10, dvector![0.0, 0.0], 0.0).unwrap();
        assert!((a.matrix() - c.matrix()).amax() > 1e-6);
    }

    #[test]
    fn least_squares_identity_has_exact_optimum() {
        let obj = make_least_squares(DMatrix::identity(2, 2), dvector![1.0, 2.0]).unwrap();
        let opt = obj.known_optimum().unwrap();
        assert!((opt.x_star - dvector![1.0, 2.0]).amax() < 1e-12);
        assert!(opt.f_star.abs() < 1e-12);
    }

    #[test]
    fn least_squares_singular_gram_has_no_optimum() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]);
        let obj = make_least_squares(m, dvector![1.0, 1.0]).unwrap();
        assert!(obj.known_optimum().is_none());
        assert!((obj.value(&dvector![1.0, 0.0]) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn least_squares_gradient_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = DMatrix::from_fn(5, 3, |_, _| rng.random_range(-1.0..1.0));
        let y = DVector::from_fn(5, |_, _| rng.random_range(-1.0..1.0));
        let obj = make_least_squares(m, y).unwrap();
        for seed in 0..5 {
            let x = seeded_point(3, seed);
            let fd = fd_gradient(&|z| obj.value(z), &x);
            let g = obj.gradient(&x);
            assert!((&g - &fd).norm() <= 1e-5 * (1.0 + g.norm()));
        }
    }

    #[test]
    fn logistic_at_zero_is_log_two() {
        let obj = make_logistic(DMatrix::from_row_slice(1, 1, &[1.0]), &[1.0], 0.0).unwrap();
        assert!((obj.value(&dvector![0.0]) - (2.0_f64).ln()).abs() < 1e-15);
    }

    #[test]
    fn pure_ridge_logistic_optimum_is_origin() {
        let features = DMatrix::zeros(4, 2);
        let obj = make_logistic(features, &[1.0, -1.0, 1.0, -1.0], 1.0).unwrap();
        let opt = obj.known_optimum().unwrap();
        assert!(opt.x_star.amax() < 1e-10);
        assert!((opt.f_star - (2.0_f64).ln()).abs() < 1e-12);
    }

    #[test]
    fn logistic_gradient_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let features = DMatrix::from_fn(20, 3, |_, _| rng.random_range(-1.0..1.0));
        let labels: Vec<f64> = (0..20)
            .map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 })
            .collect();
        let obj = make_logistic(features, &labels, 0.1).unwrap();
        for seed in 0..5 {
            let x = seeded_point(3, seed);
            let fd = fd_gradient(&|z| obj.value(z), &x);
            let g = obj.gradient(&x);
            assert!((&g - &fd).norm() <= 1e-5 * (1.0 + g.norm()));
        }
    }

    #[test]
    fn logistic_rejects_bad_labels() {
        let features = DMatrix::zeros(2, 2);
        assert!(make_logistic(features, &[1.0, 0.5], 0.0).is_err());
    }

    #[test]
    fn known_optima_are_stationary() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let features = DMatrix::from_fn(15, 3, |_, _| rng.random_range(-1.0..1.0));
        let labels: Vec<f64> = (0..15)
            .map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 })
            .collect();
        let objs = [
            make_quadratic(&[1.0, 9.0], 2, dvector![1.0, -1.0], 0.5)
                .map(Objective::Quadratic)
                .unwrap(),
            make_least_squares(
                DMatrix::from_fn(5, 2, |_, _| rng.random_range(-1.0..1.0)),
                DVector::from_fn(5, |_, _| rng.random_range(-1.0..1.0)),
            )
            .unwrap(),
            make_logistic(features, &labels, 0.2).unwrap(),
        ];
        for obj in &objs {
            let opt = obj.known_optimum().unwrap();
            assert!(obj.gradient(&opt.x_star).norm() <= 1e-8);
            assert!((obj.value(&opt.x_star) - opt.f_star).abs() <= 1e-12);
        }
    }

    #[test]
    fn convexity_spot_check() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let features = DMatrix::from_fn(10, 2, |_, _| rng.random_range(-1.0..1.0));
        let labels: Vec<f64> = (0..10)
            .map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 })
            .collect();
        let objs = [
            make_quadratic(&[0.5, 20.0], 4, dvector![0.3, -0.7], -1.0)
                .map(Objective::Quadratic)
                .unwrap(),
            make_logistic(features, &labels, 0.05).unwrap(),
        ];
        for obj in &objs {
            for _ in 0..100 {
                let x = DVector::from_fn(2, |_, _| rng.random_range(-3.0..3.0));
                let y = DVector::from_fn(2, |_, _| rng.random_range(-3.0..3.0));
                let lam: f64 = rng.random_range(0.0..1.0);
                let mix = lam * &x + (1.0 - lam) * &y;
                assert!(
                    obj.value(&mix) <= lam * obj.value(&x) + (1.0 - lam) * obj.value(&y) + 1e-9
                );
            }
        }
    }
}

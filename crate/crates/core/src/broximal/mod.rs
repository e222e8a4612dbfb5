//! The broximal operator: argmin of an objective over a norm ball.
//!
//! Quadratics over l2 / ellipsoid / linf / l1 balls get dedicated exact
//! solvers; every other combination goes through Frank-Wolfe. A brute-force
//! grid scan serves as an independent low-dimensional oracle.

mod box_qp;
mod bruteforce;
mod frank_wolfe;
mod l1_ball;
mod trust_region;

pub use box_qp::brox_box_quadratic;
pub use bruteforce::brox_bruteforce;
pub use frank_wolfe::brox_frank_wolfe;
pub use l1_ball::{brox_l1_quadratic, project_onto_l1_ball};
pub use trust_region::{brox_ellipsoid_quadratic, brox_l2_quadratic};

use nalgebra::DVector;

use crate::error::Result;
use crate::geometry::{Ball, NormKind};
use crate::problems::Objective;

/// Inner-solver tolerances and budgets.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverConfig {
    /// Relative tolerance of the exact solvers (`brox.tol`).
    pub tol: f64,
    /// Frank-Wolfe iteration budget (`brox.fw_max_iters`).
    pub fw_max_iters: usize,
    /// Frank-Wolfe duality-gap stopping threshold (`brox.fw_gap_tol`).
    pub fw_gap_tol: f64,
    /// Grid spacing of the brute-force oracle (`brox.grid_resolution`).
    pub grid_resolution: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            fw_max_iters: 50_000,
            fw_gap_tol: 1e-9,
            grid_resolution: 1e-3,
        }
    }
}

/// Which inner solver produced a broximal step.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BroxPath {
    L2Exact,
    EllipsoidExact,
    BoxCoordinate,
    L1Projected,
    FrankWolfe,
}

impl BroxPath {
    pub fn as_str(&self) -> &'static str {
        match self {
            BroxPath::L2Exact => "l2_exact",
            BroxPath::EllipsoidExact => "ellipsoid_exact",
            BroxPath::BoxCoordinate => "linf_box",
            BroxPath::L1Projected => "l1_proj_grad",
            BroxPath::FrankWolfe => "frank_wolfe",
        }
    }

    pub fn is_exact(&self) -> bool {
        !matches!(self, BroxPath::FrankWolfe)
    }
}

/// Result of one broximal solve.
#[derive(Clone, Debug)]
pub struct BroxSolution {
    /// The returned minimizer.
    pub point: DVector<f64>,
    /// Normal-cone / KKT violation at the point. For Frank-Wolfe this is the
    /// final duality gap, for the box solver the projected-gradient norm.
    pub stationarity_residual: f64,
    pub inner_iterations: usize,
    /// Whether the point sits on the ball boundary (up to tolerance).
    pub on_boundary: bool,
    pub path: BroxPath,
}

pub(crate) fn boundary_flag(dist: f64, radius: f64) -> bool {
    dist >= radius * (1.0 - 1e-9) - 1e-12
}

/// Solves `argmin { f(z) : z in ball }`, dispatching on the objective and
/// the ball's norm family.
pub fn brox(f: &Objective, ball: &Ball, cfg: &SolverConfig) -> Result<BroxSolution> {
    match (f, ball.norm().kind()) {
        (Objective::Quadratic(q), NormKind::L2) => {
            brox_l2_quadratic(q, ball.center(), ball.radius(), cfg.tol)
        }
        (Objective::Quadratic(q), NormKind::Ellipsoid(e)) => {
            brox_ellipsoid_quadratic(q, ball.center(), ball.radius(), e, cfg.tol)
        }
        (Objective::Quadratic(q), NormKind::LInf) => {
            brox_box_quadratic(q, ball.center(), ball.radius(), cfg.tol)
        }
        (Objective::Quadratic(q), NormKind::L1) => {
            brox_l1_quadratic(q, ball.center(), ball.radius(), cfg.tol)
        }
        _ => brox_frank_wolfe(f, ball, cfg.fw_max_iters, cfg.fw_gap_tol),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::NormDescriptor;
    use crate::problems::make_quadratic;
    use nalgebra::dvector;

    #[test]
    fn dispatch_routes_quadratic_l2_to_exact() {
        let q = make_quadratic(&[1.0, 1.0], 0, dvector![0.0, 0.0], 0.0).unwrap();
        let ball = Ball::new(dvector![2.0, 0.0], 1.0, NormDescriptor::l2(2)).unwrap();
        let sol = brox(&Objective::Quadratic(q), &ball, &SolverConfig::default()).unwrap();
        assert_eq!(sol.path, BroxPath::L2Exact);
        assert_eq!(sol.path.as_str(), "l2_exact");
    }

    #[test]
    fn dispatch_routes_quadratic_spectral_to_frank_wolfe() {
        let q = make_quadratic(&[1.0, 1.0, 1.0, 1.0], 0, DVector::zeros(4), 0.0).unwrap();
        let ball = Ball::new(
            dvector![2.0, 0.0, 0.0, 1.0],
            1.0,
            NormDescriptor::spectral(2, 2).unwrap(),
        )
        .unwrap();
        let sol = brox(&Objective::Quadratic(q), &ball, &SolverConfig::default()).unwrap();
        assert_eq!(sol.path, BroxPath::FrankWolfe);
    }

    #[test]
    fn dispatch_routes_non_quadratic_objectives_to_frank_wolfe() {
        let obj = crate::problems::make_least_squares(
            nalgebra::DMatrix::identity(2, 2),
            dvector![1.0, 2.0],
        )
        .unwrap();
        let ball = Ball::new(dvector![0.0, 0.0], 0.5, NormDescriptor::l2(2)).unwrap();
        let sol = brox(&obj, &ball, &SolverConfig::default()).unwrap();
        assert_eq!(sol.path, BroxPath::FrankWolfe);
    }

    #[test]
    fn dispatch_routes_box_and_l1() {
        let q = make_quadratic(&[1.0, 4.0], 1, dvector![0.0, 0.0], 0.0).unwrap();
        let obj = Objective::Quadratic(q);
        let cfg = SolverConfig::default();
        let b1 = Ball::new(dvector![2.0, 1.0], 0.5, NormDescriptor::linf(2)).unwrap();
        assert_eq!(brox(&obj, &b1, &cfg).unwrap().path, BroxPath::BoxCoordinate);
        let b2 = Ball::new(dvector![2.0, 1.0], 0.5, NormDescriptor::l1(2)).unwrap();
        assert_eq!(brox(&obj, &b2, &cfg).unwrap().path, BroxPath::L1Projected);
    }

    #[test]
    fn logistic_linf_dispatch_tracks_the_grid_oracle() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(12);
        let features = nalgebra::DMatrix::from_fn(12, 2, |_, _| rng.random_range(-1.0..1.0));
        let labels: Vec<f64> = (0..12)
            .map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 })
            .collect();
        let obj = crate::problems::make_logistic(features, &labels, 0.1).unwrap();
        let ball = Ball::new(dvector![0.5, -0.5], 0.4, NormDescriptor::linf(2)).unwrap();
        let cfg = SolverConfig { fw_max_iters: 400_000, fw_gap_tol: 1e-10, ..Default::default() };
        let sol = brox(&obj, &ball, &cfg).unwrap();
        assert_eq!(sol.path, BroxPath::FrankWolfe);
        let oracle = brox_bruteforce(&obj, &ball, 1e-3).unwrap();
        assert!((&sol.point - &oracle).norm() <= 1e-3);
    }
}

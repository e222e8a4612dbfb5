//! Outer iteration loops: the exact ball-proximal method and its linearized
//! (LMO-step) variant, with radius schedules and per-step trajectory records.

use nalgebra::DVector;

use crate::broximal::{brox, BroxPath, SolverConfig};
use crate::error::{Error, Result};
use crate::geometry::{Ball, NormDescriptor, NormKind};
use crate::problems::Objective;

/// Dual-gradient-norm threshold below which linearized runs stop early
/// rather than take a zero-gradient LMO step.
pub const LINEARIZED_GRAD_STOP: f64 = 1e-12;

/// Radius sequence for the outer loop.
#[derive(Clone, Debug, PartialEq)]
pub enum RadiusSchedule {
    Constant(f64),
    Explicit(Vec<f64>),
    /// `t_k = (f(x_k) - f*) / |grad f(x_k)|_2`; offered for Euclidean
    /// linearized runs only.
    Polyak,
}

impl RadiusSchedule {
    fn validate(&self, iters: usize) -> Result<()> {
        match self {
            RadiusSchedule::Constant(t) if !(*t > 0.0) => Err(Error::invalid(format!(
                "constant radius must be positive, got {t}"
            ))),
            RadiusSchedule::Explicit(ts) => {
                if ts.len() < iters {
                    return Err(Error::invalid(format!(
                        "explicit radius list has {} entries, {} iterations requested",
                        ts.len(),
                        iters
                    )));
                }
                if let Some(bad) = ts.iter().find(|t| !(**t > 0.0)) {
                    return Err(Error::invalid(format!("radii must be positive, got {bad}")));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Scheduled radius at step `k`, for the non-adaptive variants.
    fn fixed_value(&self, k: usize) -> Option<f64> {
        match self {
            RadiusSchedule::Constant(t) => Some(*t),
            RadiusSchedule::Explicit(ts) => ts.get(k).or(ts.last()).copied(),
            RadiusSchedule::Polyak => None,
        }
    }
}

/// Which outer method produced a trajectory.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MethodKind {
    Bpm,
    Linearized,
}

impl MethodKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            MethodKind::Bpm => "bpm",
            MethodKind::Linearized => "linearized",
        }
    }
}

/// One iterate. `radius`, `brox_path`, `stationarity_residual` and
/// `inner_iterations` describe the step leaving this iterate; the terminal
/// record keeps the scheduled radius and carries no solve.
#[derive(Clone, Debug, PartialEq)]
pub struct IterateRecord {
    pub k: usize,
    pub x: DVector<f64>,
    pub radius: f64,
    pub f_value: f64,
    pub dual_grad_norm: f64,
    /// `|x_{k+1} - x_k|` in the run norm; absent at the last record.
    pub step_length: Option<f64>,
    pub brox_path: Option<BroxPath>,
    pub stationarity_residual: f64,
    pub inner_iterations: usize,
}

/// Full record of one run.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub records: Vec<IterateRecord>,
    pub norm: NormDescriptor,
    pub objective_label: String,
    pub method: MethodKind,
    pub solver: SolverConfig,
}

impl Trajectory {
    pub fn final_point(&self) -> &DVector<f64> {
        &self.records.last().expect("trajectory is never empty").x
    }

    /// Number of steps taken (one less than the number of records).
    pub fn steps(&self) -> usize {
        self.records.len() - 1
    }
}

/// `(f(x) - f*) / |grad f(x)|_2`, the Polyak radius.
pub fn polyak_radius(f: &Objective, x: &DVector<f64>) -> Result<f64> {
    let opt = f
        .known_optimum()
        .ok_or_else(|| Error::invalid("polyak radius requires a known optimal value"))?;
    let grad_norm = f.gradient(x).norm();
    if grad_norm == 0.0 {
        return Err(Error::invalid("polyak radius undefined at a stationary point"));
    }
    Ok((f.value(x) - opt.f_star) / grad_norm)
}

fn check_start(f: &Objective, x0: &DVector<f64>, iters: usize) -> Result<()> {
    if iters < 1 {
        return Err(Error::invalid("at least one iteration is required"));
    }
    if x0.len() != f.dim() {
        return Err(Error::DimensionMismatch { expected: f.dim(), got: x0.len() });
    }
    if x0.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("starting point must be finite"));
    }
    Ok(())
}

/// Runs the exact ball-proximal iteration `x_{k+1} = argmin { f(z) :
/// |z - x_k| <= t_k }` for up to `iters` steps, stopping early once
/// `f(x_k) - f* <= stop_tol` when the optimum is known.
pub fn run_bpm(
    f: &Objective,
    norm: &NormDescriptor,
    x0: &DVector<f64>,
    sched: &RadiusSchedule,
    cfg: &SolverConfig,
    iters: usize,
    stop_tol: f64,
) -> Result<Trajectory> {
    check_start(f, x0, iters)?;
    if norm.dim() != f.dim() {
        return Err(Error::DimensionMismatch { expected: f.dim(), got: norm.dim() });
    }
    if matches!(sched, RadiusSchedule::Polyak) {
        return Err(Error::invalid(
            "the polyak schedule is only available for euclidean linearized runs",
        ));
    }
    sched.validate(iters)?;
    let f_star = f.known_optimum().map(|o| o.f_star);

    let mut records = Vec::with_capacity(iters + 1);
    let mut x = x0.clone();
    for k in 0..=iters {
        let f_value = f.value(&x);
        let grad = f.gradient(&x);
        let dual_grad_norm = norm.dual_value(&grad)?;
        let radius = sched.fixed_value(k).expect("non-adaptive schedule");
        let mut record = IterateRecord {
            k,
            x: x.clone(),
            radius,
            f_value,
            dual_grad_norm,
            step_length: None,
            brox_path: None,
            stationarity_residual: 0.0,
            inner_iterations: 0,
        };
        let converged = f_star.is_some_and(|fs| f_value - fs <= stop_tol);
        if k == iters || converged {
            records.push(record);
            break;
        }
        let ball = Ball::new(x.clone(), radius, norm.clone())?;
        let sol = brox(f, &ball, cfg).map_err(|e| e.at_step(k))?;
        record.step_length = Some(norm.value(&(&sol.point - &x))?);
        record.brox_path = Some(sol.path);
        record.stationarity_residual = sol.stationarity_residual;
        record.inner_iterations = sol.inner_iterations;
        records.push(record);
        x = sol.point;
    }

    Ok(Trajectory {
        records,
        norm: norm.clone(),
        objective_label: f.label().to_string(),
        method: MethodKind::Bpm,
        solver: *cfg,
    })
}

/// Closed-form update `x + t * lmo(norm, g)` for the given norm family:
/// greedy coordinate step for l1, normalized gradient step for l2, sign
/// step for linf, the lq-power formula for lp, `-t U V'` for spectral, and
/// the scaled inverse-metric step for ellipsoids. Returns `x` unchanged
/// when `g = 0`.
pub fn linearized_step(
    norm: &NormDescriptor,
    x: &DVector<f64>,
    g: &DVector<f64>,
    t: f64,
) -> Result<DVector<f64>> {
    if !(t > 0.0) {
        return Err(Error::invalid(format!("step length must be positive, got {t}")));
    }
    if x.len() != norm.dim() || g.len() != norm.dim() {
        return Err(Error::DimensionMismatch {
            expected: norm.dim(),
            got: if x.len() != norm.dim() { x.len() } else { g.len() },
        });
    }
    if g.iter().all(|v| *v == 0.0) {
        return Ok(x.clone());
    }
    match norm.kind() {
        NormKind::L1 => {
            let mut imax = 0;
            let mut best = f64::NEG_INFINITY;
            for (i, gi) in g.iter().enumerate() {
                if gi.abs() > best {
                    best = gi.abs();
                    imax = i;
                }
            }
            let mut out = x.clone();
            out[imax] -= t * g[imax].signum();
            Ok(out)
        }
        NormKind::L2 => Ok(x - (t / g.norm()) * g),
        NormKind::LInf => Ok(DVector::from_fn(x.len(), |i, _| {
            x[i] - t * if g[i] > 0.0 {
                1.0
            } else if g[i] < 0.0 {
                -1.0
            } else {
                0.0
            }
        })),
        NormKind::Lp(p) => {
            let q = p / (p - 1.0);
            let m = g.amax();
            let qnorm = m * g.iter().map(|v| (v.abs() / m).powf(q)).sum::<f64>().powf(1.0 / q);
            Ok(DVector::from_fn(x.len(), |i, _| {
                x[i] - t * g[i].signum() * (g[i].abs() / qnorm).powf(q - 1.0)
            }))
        }
        NormKind::Ellipsoid(e) => {
            let w = e.solve(g);
            let dual = w.dot(g).max(0.0).sqrt();
            Ok(x - (t / dual) * w)
        }
        NormKind::Spectral { .. } => Ok(x + t * norm.lmo(g)?),
    }
}

/// Runs the linearized iteration `x_{k+1} = x_k + t_k lmo(norm, grad f(x_k))`
/// for up to `iters` steps; stops early once the gradient vanishes.
pub fn run_linearized(
    f: &Objective,
    norm: &NormDescriptor,
    x0: &DVector<f64>,
    sched: &RadiusSchedule,
    iters: usize,
) -> Result<Trajectory> {
    check_start(f, x0, iters)?;
    if norm.dim() != f.dim() {
        return Err(Error::DimensionMismatch { expected: f.dim(), got: norm.dim() });
    }
    sched.validate(iters)?;
    if matches!(sched, RadiusSchedule::Polyak) {
        if f.known_optimum().is_none() {
            return Err(Error::invalid(
                "the polyak schedule requires a known optimal value",
            ));
        }
        if !matches!(norm.kind(), NormKind::L2) {
            return Err(Error::invalid(
                "the polyak schedule is only available for the l2 norm",
            ));
        }
    }

    let mut records = Vec::with_capacity(iters + 1);
    let mut x = x0.clone();
    let mut last_radius = 0.0;
    for k in 0..=iters {
        let f_value = f.value(&x);
        let grad = f.gradient(&x);
        let dual_grad_norm = norm.dual_value(&grad)?;
        let stationary = dual_grad_norm <= LINEARIZED_GRAD_STOP;
        let radius = match sched.fixed_value(k) {
            Some(t) => t,
            None if stationary => last_radius,
            None => polyak_radius(f, &x).map_err(|e| e.at_step(k))?,
        };
        let mut record = IterateRecord {
            k,
            x: x.clone(),
            radius,
            f_value,
            dual_grad_norm,
            step_length: None,
            brox_path: None,
            stationarity_residual: 0.0,
            inner_iterations: 0,
        };
        if k == iters || stationary {
            records.push(record);
            break;
        }
        // polyak can propose t = 0 exactly at the optimum even when the
        // gradient is still above the stop threshold
        if !(radius > 0.0) {
            records.push(record);
            break;
        }
        let next = linearized_step(norm, &x, &grad, radius).map_err(|e| e.at_step(k))?;
        record.step_length = Some(norm.value(&(&next - &x))?);
        records.push(record);
        last_radius = radius;
        x = next;
    }

    Ok(Trajectory {
        records,
        norm: norm.clone(),
        objective_label: f.label().to_string(),
        method: MethodKind::Linearized,
        solver: SolverConfig::default(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{make_logistic, make_quadratic};
    use nalgebra::{dvector, DMatrix};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn isotropic() -> Objective {
        Objective::Quadratic(make_quadratic(&[1.0, 1.0], 0, dvector![0.0, 0.0], 0.0).unwrap())
    }

    #[test]
    fn radial_run_reaches_origin_in_five_steps() {
        let f = isotropic();
        let traj = run_bpm(
            &f,
            &NormDescriptor::l2(2),
            &dvector![5.0, 0.0],
            &RadiusSchedule::Constant(1.0),
            &SolverConfig::default(),
            10,
            1e-14,
        )
        .unwrap();
        assert_eq!(traj.steps(), 5);
        for (k, rec) in traj.records.iter().enumerate().take(5) {
            assert!((rec.x[0] - (5.0 - k as f64)).abs() < 1e-8);
            if let Some(len) = rec.step_length {
                assert!((len - 1.0).abs() < 1e-8);
            }
        }
        assert!(traj.final_point().norm() < 1e-7);
    }

    #[test]
    fn one_step_convergence_with_large_radius() {
        let f = isotropic();
        let traj = run_bpm(
            &f,
            &NormDescriptor::l2(2),
            &dvector![5.0, 0.0],
            &RadiusSchedule::Constant(6.0),
            &SolverConfig::default(),
            10,
            1e-14,
        )
        .unwrap();
        assert_eq!(traj.steps(), 1);
        assert!(traj.final_point().norm() < 1e-12);
    }

    #[test]
    fn monotone_descent_along_exact_runs() {
        let f = Objective::Quadratic(
            make_quadratic(&[1.0, 100.0], 3, dvector![0.0, 0.0], 0.0).unwrap(),
        );
        let traj = run_bpm(
            &f,
            &NormDescriptor::linf(2),
            &dvector![2.0, 2.0],
            &RadiusSchedule::Constant(0.3),
            &SolverConfig::default(),
            30,
            1e-14,
        )
        .unwrap();
        for pair in traj.records.windows(2) {
            assert!(pair[1].f_value <= pair[0].f_value + 1e-9);
        }
    }

    #[test]
    fn explicit_schedule_must_cover_iterations() {
        let f = isotropic();
        let r = run_bpm(
            &f,
            &NormDescriptor::l2(2),
            &dvector![5.0, 0.0],
            &RadiusSchedule::Explicit(vec![1.0, 1.0]),
            &SolverConfig::default(),
            5,
            1e-14,
        );
        assert!(r.is_err());
    }

    #[test]
    fn linearized_l2_is_normalized_gradient_descent() {
        let f = Objective::Quadratic(
            make_quadratic(&[1.0, 9.0], 5, dvector![0.0, 0.0], 0.0).unwrap(),
        );
        let norm = NormDescriptor::l2(2);
        let x = dvector![1.3, -0.4];
        let g = f.gradient(&x);
        let stepped = linearized_step(&norm, &x, &g, 0.25).unwrap();
        let expect = &x - (0.25 / g.norm()) * &g;
        assert!((stepped - expect).amax() == 0.0);
    }

    #[test]
    fn linearized_linf_is_sign_descent() {
        let norm = NormDescriptor::linf(3);
        let x = dvector![0.0, 1.0, -1.0];
        let g = dvector![0.5, -2.0, 3.0];
        let stepped = linearized_step(&norm, &x, &g, 0.1).unwrap();
        assert_eq!(stepped, dvector![-0.1, 1.1, -1.1]);
    }

    #[test]
    fn linearized_l1_changes_single_coordinate() {
        let f = Objective::Quadratic(
            make_quadratic(&[1.0, 20.0], 1, dvector![0.0, 0.0], 0.0).unwrap(),
        );
        let traj = run_linearized(
            &f,
            &NormDescriptor::l1(2),
            &dvector![2.0, 2.0],
            &RadiusSchedule::Constant(0.1),
            12,
        )
        .unwrap();
        for pair in traj.records.windows(2) {
            let moved: Vec<usize> = (0..2)
                .filter(|i| pair[0].x[*i] != pair[1].x[*i])
                .collect();
            assert_eq!(moved.len(), 1);
            // gauss-southwell: the moved coordinate carries the largest gradient
            let g = f.gradient(&pair[0].x);
            let imax = if g[0].abs() >= g[1].abs() { 0 } else { 1 };
            assert_eq!(moved[0], imax);
        }
    }

    #[test]
    fn spectral_linearized_step_is_orthogonalized() {
        let norm = NormDescriptor::spectral(2, 2).unwrap();
        let x = DVector::zeros(4);
        let g = dvector![2.0, 0.0, 0.0, 1.0];
        let stepped = linearized_step(&norm, &x, &g, 0.1).unwrap();
        assert!((stepped - dvector![-0.1, 0.0, 0.0, -0.1]).amax() < 1e-12);
    }

    #[test]
    fn lp_linearized_step_matches_lmo() {
        let norm = NormDescriptor::lp(2, 3.0).unwrap();
        let x = dvector![0.0, 0.0];
        let g = dvector![1.0, 1.0];
        let stepped = linearized_step(&norm, &x, &g, 1.0).unwrap();
        let expect = -(2.0_f64).powf(-1.0 / 3.0);
        assert!((stepped[0] - expect).abs() < 1e-12);
        assert!((stepped[1] - expect).abs() < 1e-12);
    }

    #[test]
    fn linearized_step_equals_lmo_route() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let x_mat = DMatrix::from_row_slice(2, 2, &[2.0, 0.4, 0.4, 1.0]);
        let norms = vec![
            NormDescriptor::l1(2),
            NormDescriptor::l2(2),
            NormDescriptor::linf(2),
            NormDescriptor::lp(2, 2.5).unwrap(),
            NormDescriptor::ellipsoid(x_mat).unwrap(),
        ];
        for norm in &norms {
            for _ in 0..100 {
                let x = DVector::from_fn(2, |_, _| rng.random_range(-2.0..2.0));
                let g = DVector::from_fn(2, |_, _| rng.random_range(-2.0..2.0));
                if g.amax() == 0.0 {
                    continue;
                }
                let t = rng.random_range(0.01..2.0);
                let a = linearized_step(norm, &x, &g, t).unwrap();
                let b = &x + t * norm.lmo(&g).unwrap();
                assert!((a - b).amax() <= 1e-12);
            }
        }
    }

    #[test]
    fn polyak_radius_values() {
        let f = isotropic();
        assert!((polyak_radius(&f, &dvector![2.0, 0.0]).unwrap() - 1.0).abs() < 1e-15);
        assert!((polyak_radius(&f, &dvector![4.0, 0.0]).unwrap() - 2.0).abs() < 1e-15);
        assert!(polyak_radius(&f, &dvector![0.0, 0.0]).is_err());
    }

    #[test]
    fn polyak_satisfies_the_stepsize_condition() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let features = DMatrix::from_fn(20, 3, |_, _| rng.random_range(-1.0..1.0));
        let labels: Vec<f64> = (0..20)
            .map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 })
            .collect();
        let f = make_logistic(features, &labels, 0.1).unwrap();
        let opt = f.known_optimum().unwrap();
        for _ in 0..20 {
            let x = DVector::from_fn(3, |_, _| rng.random_range(-2.0..2.0));
            let g = f.gradient(&x);
            if g.norm() < 1e-10 {
                continue;
            }
            let t = polyak_radius(&f, &x).unwrap();
            assert!(t > 0.0);
            let bound = g.dot(&(&x - &opt.x_star)) / g.norm();
            assert!(t <= bound + 1e-8);
        }
    }

    #[test]
    fn polyak_rejected_outside_l2_linearized() {
        let f = isotropic();
        assert!(run_linearized(
            &f,
            &NormDescriptor::linf(2),
            &dvector![1.0, 1.0],
            &RadiusSchedule::Polyak,
            5,
        )
        .is_err());
        assert!(run_bpm(
            &f,
            &NormDescriptor::l2(2),
            &dvector![1.0, 1.0],
            &RadiusSchedule::Polyak,
            &SolverConfig::default(),
            5,
            1e-12,
        )
        .is_err());
    }

    #[test]
    fn identical_runs_are_bitwise_identical() {
        let f = Objective::Quadratic(
            make_quadratic(&[1.0, 40.0], 7, dvector![0.0, 0.0], 0.0).unwrap(),
        );
        let run = || {
            run_bpm(
                &f,
                &NormDescriptor::linf(2),
                &dvector![2.0, 1.0],
                &RadiusSchedule::Constant(0.4),
                &SolverConfig::default(),
                15,
                1e-13,
            )
            .unwrap()
        };
        let a = run();
        let b = run();
        assert_eq!(a.records, b.records);
    }
}

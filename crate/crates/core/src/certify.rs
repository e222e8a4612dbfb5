//! Runtime certificates: mechanical checks of the convergence inequalities
//! on recorded trajectories, plus the search for an linf step that moves
//! away from the minimizer.
//!
//! Every certificate is a pure function of the trajectory and optimum data;
//! certification is deterministic and idempotent. Each reported pass states
//! the slack it used. Steps solved by Frank-Wolfe inflate the slack by the
//! recorded duality gap; zero-inexactness checks are reserved for the
//! closed-form linearized steps.

use std::ops::Range;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::broximal::{brox_box_quadratic, BroxPath};
use crate::error::{Error, Result};
use crate::geometry::NormKind;
use crate::methods::{MethodKind, Trajectory};
use crate::problems::{make_quadratic, KnownOptimum, Objective};

/// Outcome of one certificate check.
#[derive(Clone, Debug)]
pub struct Certificate {
    pub name: &'static str,
    /// Some certificates require inner-product norms, known optima or exact
    /// inner solves; inapplicable ones pass vacuously and are marked.
    pub applicable: bool,
    pub pass: bool,
    pub worst_violation: f64,
    pub worst_step: usize,
    pub slack_used: f64,
    pub steps_checked: usize,
    pub steps_skipped: usize,
}

impl Certificate {
    fn not_applicable(name: &'static str) -> Self {
        Self {
            name,
            applicable: false,
            pass: true,
            worst_violation: 0.0,
            worst_step: 0,
            slack_used: 0.0,
            steps_checked: 0,
            steps_skipped: 0,
        }
    }
}

/// Accumulates per-step (violation, slack) pairs; the reported step is the
/// one with the largest violation-over-slack excess.
struct WorstTracker {
    name: &'static str,
    violation: f64,
    step: usize,
    slack: f64,
    excess: f64,
    checked: usize,
    skipped: usize,
}

impl WorstTracker {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            violation: 0.0,
            step: 0,
            slack: 0.0,
            excess: f64::NEG_INFINITY,
            checked: 0,
            skipped: 0,
        }
    }

    fn observe(&mut self, step: usize, violation: f64, slack: f64) {
        self.checked += 1;
        if violation - slack > self.excess {
            self.excess = violation - slack;
            self.violation = violation;
            self.step = step;
            self.slack = slack;
        }
    }

    fn skip(&mut self) {
        self.skipped += 1;
    }

    fn finish(self) -> Certificate {
        Certificate {
            name: self.name,
            applicable: true,
            pass: self.checked == 0 || self.violation <= self.slack,
            worst_violation: self.violation,
            worst_step: self.step,
            slack_used: self.slack,
            steps_checked: self.checked,
            steps_skipped: self.skipped,
        }
    }
}

/// Recorded inner-solve inexactness for the step leaving record `k`:
/// the duality gap on Frank-Wolfe paths, zero otherwise.
fn step_gap(traj: &Trajectory, k: usize) -> f64 {
    match traj.records[k].brox_path {
        Some(BroxPath::FrankWolfe) => traj.records[k].stationarity_residual.max(0.0),
        _ => 0.0,
    }
}

fn all_paths_exact(traj: &Trajectory) -> bool {
    traj.records
        .iter()
        .filter_map(|r| r.brox_path)
        .all(|p| p.is_exact())
}

/// Membership tolerance of the case split "does the ball contain x*".
const CASE_SPLIT_TOL: f64 = 1e-9;

/// Function-value contraction: `f(x_{k+1}) - f* <=
/// (1 + t_k / |x_{k+1} - x*|)^{-1} (f(x_k) - f*)` at every step, with slack
/// `10 (tol + gap) (1 + |f(x_k)|)`. Steps landing on `x*` are checked via
/// `f(x_{k+1}) - f* <= slack` since the denominator vanishes.
pub fn certify_fval_rate(traj: &Trajectory, opt: &KnownOptimum) -> Result<Certificate> {
    if traj.method != MethodKind::Bpm {
        return Ok(Certificate::not_applicable("fval_rate"));
    }
    let mut w = WorstTracker::new("fval_rate");
    for k in 0..traj.steps() {
        let cur = &traj.records[k];
        let next = &traj.records[k + 1];
        let slack = 10.0 * (traj.solver.tol + step_gap(traj, k)) * (1.0 + cur.f_value.abs());
        let lhs = next.f_value - opt.f_star;
        let denom = traj.norm.value(&(&next.x - &opt.x_star))?;
        if denom <= 1e-12 * (1.0 + cur.radius) {
            w.observe(k, lhs.max(0.0), slack);
            continue;
        }
        let rhs = (cur.f_value - opt.f_star) / (1.0 + cur.radius / denom);
        w.observe(k, (lhs - rhs).max(0.0), slack);
    }
    Ok(w.finish())
}

/// Alternative contraction with factor `1 - t_k / |x_k - x*|`, checked on
/// steps where `t_k < |x_k - x*|`.
pub fn certify_fval_rate_alt(traj: &Trajectory, opt: &KnownOptimum) -> Result<Certificate> {
    if traj.method != MethodKind::Bpm {
        return Ok(Certificate::not_applicable("fval_rate_alt"));
    }
    let mut w = WorstTracker::new("fval_rate_alt");
    for k in 0..traj.steps() {
        let cur = &traj.records[k];
        let next = &traj.records[k + 1];
        let dist = traj.norm.value(&(&cur.x - &opt.x_star))?;
        if cur.radius >= dist {
            w.skip();
            continue;
        }
        let slack = 10.0 * (traj.solver.tol + step_gap(traj, k)) * (1.0 + cur.f_value.abs());
        let lhs = next.f_value - opt.f_star;
        let rhs = (1.0 - cur.radius / dist) * (cur.f_value - opt.f_star);
        w.observe(k, (lhs - rhs).max(0.0), slack);
    }
    Ok(w.finish())
}

/// Dual-norm gradient monotonicity (`gradient_monotone`) and the averaged
/// bound `sum (t_k / T) |grad f(x_{k+1})|_* <= (f(x_0) - f*) / T`
/// (`gradient_averaged`, requires a known optimal value). Linearized
/// trajectories are not covered.
pub fn certify_gradient(traj: &Trajectory, f_star: Option<f64>) -> Vec<Certificate> {
    if traj.method != MethodKind::Bpm {
        return vec![
            Certificate::not_applicable("gradient_monotone"),
            Certificate::not_applicable("gradient_averaged"),
        ];
    }
    let mut mono = WorstTracker::new("gradient_monotone");
    for k in 0..traj.steps() {
        let g_cur = traj.records[k].dual_grad_norm;
        let g_next = traj.records[k + 1].dual_grad_norm;
        let slack = 1e-6 * (1.0 + g_cur) + step_gap(traj, k);
        mono.observe(k, (g_next - g_cur).max(0.0), slack);
    }

    let averaged = match f_star {
        None => Certificate::not_applicable("gradient_averaged"),
        Some(f_star) if traj.steps() == 0 => {
            let _ = f_star;
            Certificate::not_applicable("gradient_averaged")
        }
        Some(f_star) => {
            let n = traj.steps();
            let total: f64 = traj.records[..n].iter().map(|r| r.radius).sum();
            let lhs: f64 = (0..n)
                .map(|k| traj.records[k].radius / total * traj.records[k + 1].dual_grad_norm)
                .sum();
            let rhs = (traj.records[0].f_value - f_star) / total;
            let gaps: f64 = (0..n).map(|k| step_gap(traj, k)).sum();
            let slack = 1e-6 * (1.0 + traj.records[0].dual_grad_norm) + gaps / total;
            let mut w = WorstTracker::new("gradient_averaged");
            w.observe(n - 1, (lhs - rhs).max(0.0), slack);
            w.finish()
        }
    };
    vec![mono.finish(), averaged]
}

/// Squared-distance recursion `|x_{k+1} - x*|^2 <= |x_k - x*|^2 - t_k^2`
/// (`distance_recursion`) for inner-product norms, excluding steps whose
/// ball already contains `x*`, plus the finite-convergence corollary
/// (`finite_convergence`): once `sum t_k^2 >= |x_0 - x*|^2`, the final
/// iterate must be optimal up to solver slack.
///
/// Applies to exact inner solves only: an f-value duality gap does not
/// bound the squared-distance perturbation, so inexact trajectories are
/// marked not-applicable.
pub fn certify_distance(traj: &Trajectory, opt: &KnownOptimum) -> Result<Vec<Certificate>> {
    if traj.method != MethodKind::Bpm
        || !traj.norm.is_inner_product()
        || !all_paths_exact(traj)
    {
        return Ok(vec![
            Certificate::not_applicable("distance_recursion"),
            Certificate::not_applicable("finite_convergence"),
        ]);
    }
    let mut w = WorstTracker::new("distance_recursion");
    for k in 0..traj.steps() {
        let cur = &traj.records[k];
        let next = &traj.records[k + 1];
        let d_cur = traj.norm.value(&(&cur.x - &opt.x_star))?;
        if d_cur <= cur.radius + CASE_SPLIT_TOL {
            w.skip();
            continue;
        }
        let d_next = traj.norm.value(&(&next.x - &opt.x_star))?;
        let slack = 1e-6 * (1.0 + d_cur * d_cur) + step_gap(traj, k);
        let violation = d_next * d_next - (d_cur * d_cur - cur.radius * cur.radius);
        w.observe(k, violation.max(0.0), slack);
    }

    let n = traj.steps();
    let finite = if n == 0 {
        Certificate::not_applicable("finite_convergence")
    } else {
        let d0 = traj.norm.value(&(&traj.records[0].x - &opt.x_star))?;
        let budget: f64 = traj.records[..n].iter().map(|r| r.radius * r.radius).sum();
        let mut fw = WorstTracker::new("finite_convergence");
        if budget >= d0 * d0 {
            let last = traj.records.last().expect("non-empty");
            let slack =
                10.0 * (traj.solver.tol + step_gap(traj, n - 1)) * (1.0 + opt.f_star.abs());
            fw.observe(n - 1, (last.f_value - opt.f_star).max(0.0), slack);
        } else {
            fw.skip();
        }
        fw.finish()
    };
    Ok(vec![w.finish(), finite])
}

/// Boundary law `|x_{k+1} - x_k| = t_k` (`boundary_law`) and the
/// normal-cone alignment identity `<-grad f(x_{k+1}), x_{k+1} - x_k> =
/// |grad f(x_{k+1})|_* |x_{k+1} - x_k|` (`kkt_alignment`) on steps whose
/// ball excludes `x*`; for ellipsoid norms additionally the collinearity
/// `grad f(x_{k+1}) = c X (x_k - x_{k+1})`, `c >= 0`
/// (`ellipsoid_collinearity`). Requires exact inner solves.
pub fn certify_boundary_and_kkt(
    traj: &Trajectory,
    f: &Objective,
    opt: &KnownOptimum,
) -> Result<Vec<Certificate>> {
    let exact = traj.method == MethodKind::Bpm && all_paths_exact(traj);
    let is_ellipsoid = matches!(traj.norm.kind(), NormKind::Ellipsoid(_));
    if !exact {
        let mut out = vec![
            Certificate::not_applicable("boundary_law"),
            Certificate::not_applicable("kkt_alignment"),
        ];
        if is_ellipsoid {
            out.push(Certificate::not_applicable("ellipsoid_collinearity"));
        }
        return Ok(out);
    }

    let mut boundary = WorstTracker::new("boundary_law");
    let mut alignment = WorstTracker::new("kkt_alignment");
    let mut collinear = WorstTracker::new("ellipsoid_collinearity");
    for k in 0..traj.steps() {
        let cur = &traj.records[k];
        let next = &traj.records[k + 1];
        let dist_star = traj.norm.value(&(&cur.x - &opt.x_star))?;
        if dist_star <= cur.radius + CASE_SPLIT_TOL {
            boundary.skip();
            alignment.skip();
            collinear.skip();
            continue;
        }
        let step_len = cur.step_length.expect("non-terminal record");
        boundary.observe(k, (step_len - cur.radius).abs(), 1e-6 * cur.radius);

        let grad_next = f.gradient(&next.x);
        let dual_next = traj.norm.dual_value(&grad_next)?;
        let lhs = (-&grad_next).dot(&(&next.x - &cur.x));
        let rhs = dual_next * step_len;
        alignment.observe(k, (lhs - rhs).abs(), 1e-6 * (1.0 + dual_next));

        if let NormKind::Ellipsoid(e) = traj.norm.kind() {
            let v = e.matrix() * (&cur.x - &next.x);
            let vv = v.norm_squared();
            let c = if vv > 0.0 { (grad_next.dot(&v) / vv).max(0.0) } else { 0.0 };
            let residual = (&grad_next - c * &v).norm() / (1.0 + grad_next.norm());
            collinear.observe(k, residual, 1e-6);
        }
    }
    let mut out = vec![boundary.finish(), alignment.finish()];
    if is_ellipsoid {
        out.push(collinear.finish());
    }
    Ok(out)
}

/// Distance recursion for linearized Euclidean runs
/// (`linearized_distance`): on steps whose radius satisfies the stepsize
/// condition `t_k <= <grad f(x_k), x_k - x*> / |grad f(x_k)|_2`, checks
/// `|x_{k+1} - x*|^2 <= |x_k - x*|^2 - t_k^2 + 1e-9`. Steps violating the
/// condition are skipped and counted.
pub fn certify_linearized_distance(
    traj: &Trajectory,
    f: &Objective,
    opt: &KnownOptimum,
) -> Certificate {
    if traj.method != MethodKind::Linearized || !matches!(traj.norm.kind(), NormKind::L2) {
        return Certificate::not_applicable("linearized_distance");
    }
    let mut w = WorstTracker::new("linearized_distance");
    for k in 0..traj.steps() {
        let cur = &traj.records[k];
        let next = &traj.records[k + 1];
        let g = f.gradient(&cur.x);
        let gn = g.norm();
        if gn == 0.0 {
            w.skip();
            continue;
        }
        let bound = g.dot(&(&cur.x - &opt.x_star)) / gn;
        if cur.radius > bound + 1e-12 {
            w.skip();
            continue;
        }
        let d_cur = (&cur.x - &opt.x_star).norm_squared();
        let d_next = (&next.x - &opt.x_star).norm_squared();
        w.observe(k, (d_next - (d_cur - cur.radius * cur.radius)).max(0.0), 1e-9);
    }
    w.finish()
}

/// Full certificate report for a trajectory.
#[derive(Clone, Debug)]
pub struct CertificateReport {
    pub entries: Vec<Certificate>,
    pub trajectory_label: String,
    /// Free-form observations, e.g. recorded distance increases on
    /// non-inner-product norms.
    pub notes: Vec<String>,
}

impl CertificateReport {
    pub fn all_pass(&self) -> bool {
        self.entries.iter().all(|c| !c.applicable || c.pass)
    }
}

/// Runs every certificate that applies to the trajectory.
pub fn certify_all(traj: &Trajectory, f: &Objective) -> Result<CertificateReport> {
    let opt = f.known_optimum();
    let mut entries = Vec::new();
    match &opt {
        Some(opt) => {
            entries.push(certify_fval_rate(traj, opt)?);
            entries.push(certify_fval_rate_alt(traj, opt)?);
            entries.extend(certify_gradient(traj, Some(opt.f_star)));
            entries.extend(certify_distance(traj, opt)?);
            entries.extend(certify_boundary_and_kkt(traj, f, opt)?);
            entries.push(certify_linearized_distance(traj, f, opt));
        }
        None => {
            entries.push(Certificate::not_applicable("fval_rate"));
            entries.push(Certificate::not_applicable("fval_rate_alt"));
            entries.extend(certify_gradient(traj, None));
            entries.push(Certificate::not_applicable("distance_recursion"));
            entries.push(Certificate::not_applicable("finite_convergence"));
            entries.push(Certificate::not_applicable("boundary_law"));
            entries.push(Certificate::not_applicable("kkt_alignment"));
            entries.push(Certificate::not_applicable("linearized_distance"));
        }
    }

    let mut notes = Vec::new();
    if let Some(opt) = &opt {
        if !traj.norm.is_inner_product() {
            for k in 0..traj.steps() {
                let d_cur = traj.norm.value(&(&traj.records[k].x - &opt.x_star))?;
                let d_next = traj.norm.value(&(&traj.records[k + 1].x - &opt.x_star))?;
                if d_next > d_cur {
                    notes.push(format!(
                        "distance to the minimizer increased at step {k}: {d_cur} -> {d_next}"
                    ));
                }
            }
        }
    }

    Ok(CertificateReport {
        entries,
        trajectory_label: format!(
            "{} / {} / {}",
            traj.objective_label,
            traj.norm.family_name(),
            traj.method.as_str()
        ),
        notes,
    })
}

/// A one-step linf instance whose exact solve moves away from the
/// minimizer in linf distance.
#[derive(Clone, Debug)]
pub struct CounterexampleRecord {
    pub seed: u64,
    pub eigenvalues: Vec<f64>,
    pub matrix: DMatrix<f64>,
    pub x_star: DVector<f64>,
    pub x0: DVector<f64>,
    pub radius: f64,
    pub x1: DVector<f64>,
    pub dist_before: f64,
    pub dist_after: f64,
    pub f0: f64,
    pub f1: f64,
}

/// Required relative growth of the linf distance for an instance to count.
pub const COUNTEREXAMPLE_MARGIN: f64 = 0.01;

/// Searches seeded rotated quadratics, centers and radii for an exact
/// linf step with `|x_1 - x*|_inf >= (1 + margin) |x_0 - x*|_inf`.
/// Exhausting the seed range without a hit is an error: the phenomenon is
/// guaranteed to exist, so a fruitless search indicates a solver bug.
pub fn find_linf_distance_increase(
    seed_range: Range<u64>,
    dim: usize,
) -> Result<CounterexampleRecord> {
    if dim < 2 {
        return Err(Error::invalid("the distance-increase search needs dim >= 2"));
    }
    for seed in seed_range.clone() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut eigenvalues = vec![1.0; dim];
        for e in eigenvalues.iter_mut().skip(1) {
            *e = 10.0_f64.powf(rng.random_range(0.5..2.0));
        }
        let x_star = DVector::zeros(dim);
        let q = make_quadratic(&eigenvalues, seed, x_star.clone(), 0.0)?;
        let x0 = DVector::from_fn(dim, |_, _| rng.random_range(-3.0..3.0));
        let dist_before = x0.amax();
        if dist_before < 0.5 {
            continue;
        }
        let radius = rng.random_range(0.15..0.7) * dist_before;
        let sol = brox_box_quadratic(&q, &x0, radius, 1e-10)?;
        let dist_after = sol.point.amax();
        let f0 = q.value(&x0);
        let f1 = q.value(&sol.point);
        let step_len = (&sol.point - &x0).amax();
        let solver_sane = f1 <= f0 + 1e-12 && (step_len - radius).abs() <= 1e-6 * radius;
        if solver_sane && dist_after >= (1.0 + COUNTEREXAMPLE_MARGIN) * dist_before {
            return Ok(CounterexampleRecord {
                seed,
                eigenvalues,
                matrix: q.matrix().clone(),
                x_star,
                x0,
                radius,
                x1: sol.point,
                dist_before,
                dist_after,
                f0,
                f1,
            });
        }
    }
    Err(Error::SearchExhausted(format!(
        "no linf distance increase found for seeds {seed_range:?}"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::broximal::SolverConfig;
    use crate::geometry::NormDescriptor;
    use crate::methods::{run_bpm, run_linearized, RadiusSchedule};
    use nalgebra::dvector;

    fn isotropic() -> Objective {
        Objective::Quadratic(make_quadratic(&[1.0, 1.0], 0, dvector![0.0, 0.0], 0.0).unwrap())
    }

    fn radial_run() -> (Trajectory, Objective) {
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
        (traj, f)
    }

    #[test]
    fn fval_rate_on_the_radial_run() {
        let (traj, f) = radial_run();
        let opt = f.known_optimum().unwrap();
        let cert = certify_fval_rate(&traj, &opt).unwrap();
        assert!(cert.pass, "violation {}", cert.worst_violation);
        // first step reads f1 - f* <= (1 + 1/4)^{-1} (f0 - f*), i.e. 8 <= 10
        assert!((traj.records[0].f_value - 12.5).abs() < 1e-10);
        assert!((traj.records[1].f_value - 8.0).abs() < 1e-8);
        let d1 = (&traj.records[1].x - &opt.x_star).norm();
        assert!((d1 - 4.0).abs() < 1e-8);
    }

    #[test]
    fn fval_rate_handles_steps_landing_on_the_optimum() {
        let f = isotropic();
        let traj = run_bpm(
            &f,
            &NormDescriptor::l2(2),
            &dvector![5.0, 0.0],
            &RadiusSchedule::Constant(6.0),
            &SolverConfig::default(),
            3,
            1e-14,
        )
        .unwrap();
        // the single step lands exactly on x*, exercising the vanishing
        // denominator fallback
        assert_eq!(traj.steps(), 1);
        let cert = certify_fval_rate(&traj, &f.known_optimum().unwrap()).unwrap();
        assert!(cert.pass && cert.steps_checked == 1);
    }

    #[test]
    fn alt_rate_on_the_radial_run() {
        let (traj, f) = radial_run();
        let cert = certify_fval_rate_alt(&traj, &f.known_optimum().unwrap()).unwrap();
        assert!(cert.pass);
        assert!(cert.steps_checked > 0);
    }

    #[test]
    fn gradient_sequence_is_strictly_decreasing() {
        let (traj, f) = radial_run();
        let expect = [5.0, 4.0, 3.0, 2.0, 1.0, 0.0];
        for (rec, e) in traj.records.iter().zip(expect) {
            assert!((rec.dual_grad_norm - e).abs() < 1e-7);
        }
        let certs = certify_gradient(&traj, f.known_optimum().map(|o| o.f_star));
        assert!(certs.iter().all(|c| c.pass && c.applicable));
        // averaged bound with t = 1, K = 5: mean dual gradient 2 <= 12.5 / 5
        let n = traj.steps();
        let mean: f64 =
            (0..n).map(|k| traj.records[k + 1].dual_grad_norm).sum::<f64>() / n as f64;
        assert!((mean - 2.0).abs() < 1e-7);
        assert!(mean <= 12.5 / n as f64);
    }

    #[test]
    fn distance_recursion_on_the_radial_run() {
        let (traj, f) = radial_run();
        let opt = f.known_optimum().unwrap();
        let expect = [25.0, 16.0, 9.0, 4.0, 1.0, 0.0];
        for (rec, e) in traj.records.iter().zip(expect) {
            let d2 = (&rec.x - &opt.x_star).norm_squared();
            assert!((d2 - e).abs() < 1e-6);
        }
        let certs = certify_distance(&traj, &opt).unwrap();
        assert!(certs.iter().all(|c| c.pass));
        // converged after 5 steps, so the 25-step radius budget is never
        // consumed and the corollary holds vacuously
        let finite = certs.iter().find(|c| c.name == "finite_convergence").unwrap();
        assert!(finite.applicable && finite.steps_checked == 0);
    }

    #[test]
    fn finite_convergence_triggers_on_one_step_runs() {
        let f = isotropic();
        let traj = run_bpm(
            &f,
            &NormDescriptor::l2(2),
            &dvector![5.0, 0.0],
            &RadiusSchedule::Constant(6.0),
            &SolverConfig::default(),
            3,
            1e-14,
        )
        .unwrap();
        let certs = certify_distance(&traj, &f.known_optimum().unwrap()).unwrap();
        let finite = certs.iter().find(|c| c.name == "finite_convergence").unwrap();
        assert!(finite.applicable && finite.steps_checked == 1 && finite.pass);
    }

    #[test]
    fn boundary_and_alignment_on_the_radial_run() {
        let (traj, f) = radial_run();
        let opt = f.known_optimum().unwrap();
        // at k = 0: <-grad f(x1), x1 - x0> = <-(4,0), (-1,0)> = 4 = |(4,0)| * 1
        let g1 = f.gradient(&traj.records[1].x);
        let lhs = (-&g1).dot(&(&traj.records[1].x - &traj.records[0].x));
        assert!((lhs - 4.0).abs() < 1e-7);
        let certs = certify_boundary_and_kkt(&traj, &f, &opt).unwrap();
        assert_eq!(certs.len(), 2);
        assert!(certs.iter().all(|c| c.pass && c.applicable));
    }

    #[test]
    fn distance_cert_not_applicable_off_inner_product_norms() {
        let f = isotropic();
        let traj = run_bpm(
            &f,
            &NormDescriptor::linf(2),
            &dvector![2.0, 1.0],
            &RadiusSchedule::Constant(0.5),
            &SolverConfig::default(),
            5,
            1e-14,
        )
        .unwrap();
        let certs = certify_distance(&traj, &f.known_optimum().unwrap()).unwrap();
        assert!(certs.iter().all(|c| !c.applicable));
    }

    #[test]
    fn gradient_cert_rejects_linearized_runs() {
        let f = isotropic();
        let traj = run_linearized(
            &f,
            &NormDescriptor::l2(2),
            &dvector![3.0, 0.0],
            &RadiusSchedule::Polyak,
            10,
        )
        .unwrap();
        let certs = certify_gradient(&traj, Some(0.0));
        assert!(certs.iter().all(|c| !c.applicable));
        let lin = certify_linearized_distance(&traj, &f, &f.known_optimum().unwrap());
        assert!(lin.applicable && lin.pass);
    }

    #[test]
    fn counterexample_search_finds_an_instance() {
        let rec = find_linf_distance_increase(0..500, 2).unwrap();
        assert!(rec.dist_after >= 1.01 * rec.dist_before);
        assert!(rec.f1 <= rec.f0);
        let step = (&rec.x1 - &rec.x0).amax();
        assert!((step - rec.radius).abs() <= 1e-6 * rec.radius);
        // the same trajectory still satisfies the f-value and gradient laws
        let q = make_quadratic(&rec.eigenvalues, rec.seed, rec.x_star.clone(), 0.0).unwrap();
        let f = Objective::Quadratic(q);
        let traj = run_bpm(
            &f,
            &NormDescriptor::linf(2),
            &rec.x0,
            &RadiusSchedule::Constant(rec.radius),
            &SolverConfig::default(),
            1,
            0.0,
        )
        .unwrap();
        assert!((traj.final_point() - &rec.x1).amax() < 1e-9);
        let report = certify_all(&traj, &f).unwrap();
        assert!(report.all_pass());
        assert!(!report.notes.is_empty());
    }
}

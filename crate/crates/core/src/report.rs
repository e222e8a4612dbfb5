//! CSV and text emission for trajectories, certificate reports and
//! counterexample fixtures.
//!
//! Every CSV starts with the version comment `#schema=1` followed by a
//! header row. Floats are printed with 17 significant digits so values
//! round-trip exactly.

use crate::certify::{CertificateReport, CounterexampleRecord};
use crate::config::{ExperimentConfig, MethodSpec, NormSpec, ProblemSpec, RadiusSpec};
use crate::methods::Trajectory;
use crate::problems::KnownOptimum;

pub const SCHEMA_LINE: &str = "#schema=1";

/// 17-significant-digit formatting; round-trips any finite f64.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Trajectory CSV with columns
/// `k,t_k,f,fgap,dual_grad_norm,step_len,dist_l2,dist_norm`. Fields that
/// need a known optimum are left empty when it is absent, as is `step_len`
/// on the terminal row.
pub fn trajectory_csv(traj: &Trajectory, opt: Option<&KnownOptimum>) -> String {
    let mut out = String::new();
    out.push_str(SCHEMA_LINE);
    out.push('\n');
    out.push_str("k,t_k,f,fgap,dual_grad_norm,step_len,dist_l2,dist_norm\n");
    for rec in &traj.records {
        let fgap = opt.map(|o| fmt_float(rec.f_value - o.f_star)).unwrap_or_default();
        let dist_l2 = opt
            .map(|o| fmt_float((&rec.x - &o.x_star).norm()))
            .unwrap_or_default();
        let dist_norm = opt
            .and_then(|o| traj.norm.value(&(&rec.x - &o.x_star)).ok())
            .map(fmt_float)
            .unwrap_or_default();
        let step_len = rec.step_length.map(fmt_float).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            rec.k,
            fmt_float(rec.radius),
            fmt_float(rec.f_value),
            fgap,
            fmt_float(rec.dual_grad_norm),
            step_len,
            dist_l2,
            dist_norm,
        ));
    }
    out
}

/// Certificate CSV with columns
/// `certificate,pass,worst_violation,worst_step,slack`; inapplicable
/// certificates carry `na` in the pass column.
pub fn certificates_csv(report: &CertificateReport) -> String {
    let mut out = String::new();
    out.push_str(SCHEMA_LINE);
    out.push('\n');
    out.push_str("certificate,pass,worst_violation,worst_step,slack\n");
    for c in &report.entries {
        let pass = if !c.applicable {
            "na"
        } else if c.pass {
            "true"
        } else {
            "false"
        };
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            c.name,
            pass,
            fmt_float(c.worst_violation),
            c.worst_step,
            fmt_float(c.slack_used),
        ));
    }
    out
}

/// Human-readable certificate report.
pub fn certificates_text(report: &CertificateReport) -> String {
    let mut out = String::new();
    out.push_str(&format!("certificate report: {}\n", report.trajectory_label));
    for c in &report.entries {
        if !c.applicable {
            out.push_str(&format!("  {:<24} not applicable\n", c.name));
        } else {
            out.push_str(&format!(
                "  {:<24} {}  worst violation {:.3e} (slack {:.3e}) at step {}, {} checked / {} skipped\n",
                c.name,
                if c.pass { "PASS" } else { "FAIL" },
                c.worst_violation,
                c.slack_used,
                c.worst_step,
                c.steps_checked,
                c.steps_skipped,
            ));
        }
    }
    for note in &report.notes {
        out.push_str(&format!("  note: {note}\n"));
    }
    out.push_str(&format!(
        "  overall: {}\n",
        if report.all_pass() { "PASS" } else { "FAIL" }
    ));
    out
}

/// A replayable run config for a distance-increase instance, with the
/// observed step recorded in comment lines.
pub fn counterexample_fixture(rec: &CounterexampleRecord) -> String {
    let cfg = ExperimentConfig {
        problem: ProblemSpec::Quadratic {
            eigenvalues: rec.eigenvalues.clone(),
            xstar: rec.x_star.iter().copied().collect(),
            fstar: 0.0,
        },
        norm: NormSpec::LInf,
        method: MethodSpec::Bpm,
        radius: RadiusSpec::Const(rec.radius),
        iters: 1,
        stop_tol: 0.0,
        seed: rec.seed,
        solver: crate::broximal::SolverConfig::default(),
        x0: rec.x0.iter().copied().collect(),
        out_dir: None,
    };
    let mut out = String::new();
    out.push_str("# linf distance-increase fixture\n");
    out.push_str(&format!(
        "# x1 = {}\n",
        rec.x1.iter().map(|v| fmt_float(*v)).collect::<Vec<_>>().join(",")
    ));
    out.push_str(&format!(
        "# dist_before = {}, dist_after = {}\n",
        fmt_float(rec.dist_before),
        fmt_float(rec.dist_after)
    ));
    out.push_str(&cfg.to_config_string());
    out
}

/// Counterexample summary CSV; vectors are semicolon-joined.
pub fn counterexample_csv(rec: &CounterexampleRecord) -> String {
    let join = |v: &nalgebra::DVector<f64>| {
        v.iter().map(|x| fmt_float(*x)).collect::<Vec<_>>().join(";")
    };
    let mut out = String::new();
    out.push_str(SCHEMA_LINE);
    out.push('\n');
    out.push_str("seed,radius,dist_before,dist_after,f0,f1,x0,x1\n");
    out.push_str(&format!(
        "{},{},{},{},{},{},{},{}\n",
        rec.seed,
        fmt_float(rec.radius),
        fmt_float(rec.dist_before),
        fmt_float(rec.dist_after),
        fmt_float(rec.f0),
        fmt_float(rec.f1),
        join(&rec.x0),
        join(&rec.x1),
    ));
    out
}

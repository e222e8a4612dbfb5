//! Configuration-driven experiment runner.
//!
//! Exit codes: 0 all applicable certificates pass, 1 certificate failure,
//! 2 bad config or input, 3 inner-solver convergence failure, 4 search
//! failure. The `BROX_SEED` environment variable overrides the config seed.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use brox_core::certify::{certify_all, find_linf_distance_increase};
use brox_core::config::{ExperimentConfig, MethodSpec, NormSpec};
use brox_core::error::Error;
use brox_core::methods::{run_bpm, run_linearized, Trajectory};
use brox_core::problems::Objective;
use brox_core::report::{
    certificates_csv, certificates_text, counterexample_csv, counterexample_fixture, fmt_float,
    trajectory_csv, SCHEMA_LINE,
};

#[derive(Parser)]
#[command(name = "brox", about = "Ball-proximal optimization runs with convergence certificates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct OutDir {
    /// Output directory for generated files.
    #[arg(long = "out")]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Execute a configured run; writes trajectory.csv and certificates.csv.
    Run {
        config: PathBuf,
        #[command(flatten)]
        out: OutDir,
    },
    /// Re-certify a recorded trajectory against its config.
    Certify {
        trajectory: PathBuf,
        config: PathBuf,
        #[command(flatten)]
        out: OutDir,
    },
    /// Emit LMO outputs with verification columns for seeded gradients.
    LmoTable {
        /// Comma-separated dimensions for the vector norms.
        #[arg(long, default_value = "2,3")]
        dims: String,
        /// Comma-separated norm tokens.
        #[arg(long, default_value = "l1,l2,linf,lp:3,spectral:2x2")]
        norms: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Seeded gradients per (norm, dim) pair.
        #[arg(long, default_value_t = 3)]
        trials: usize,
        #[command(flatten)]
        out: OutDir,
    },
    /// Search for an linf step that increases the distance to the minimizer.
    Counterexample {
        #[arg(long, default_value_t = 0)]
        seed_start: u64,
        #[arg(long, default_value_t = 1000)]
        seed_count: u64,
        #[command(flatten)]
        out: OutDir,
    },
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Convergence { .. } => 3,
        Error::AtStep { source, .. } => exit_code_for(source),
        Error::SearchExhausted(_) => 4,
        _ => 2,
    }
}

fn resolve_out(out: &OutDir, cfg_out: Option<&String>) -> PathBuf {
    out.out
        .clone()
        .or_else(|| cfg_out.map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."))
}

fn write_out(dir: &Path, name: &str, content: &str) -> std::io::Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(name);
    std::fs::write(&path, content)?;
    Ok(path)
}

fn load_config(path: &Path) -> Result<(ExperimentConfig, PathBuf), Error> {
    let mut cfg = ExperimentConfig::load(path)?;
    if let Ok(seed) = std::env::var("BROX_SEED") {
        cfg.seed = seed
            .parse()
            .map_err(|_| Error::Config(format!("bad BROX_SEED value '{seed}'")))?;
    }
    let base = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("."));
    cfg.validate_files(&base)?;
    Ok((cfg, base))
}

fn execute(cfg: &ExperimentConfig, base: &Path) -> Result<(Trajectory, Objective), Error> {
    let objective = cfg.build_objective(base)?;
    let norm = cfg.build_norm(base)?;
    let schedule = cfg.radius.to_schedule();
    let x0 = cfg.starting_point();
    let traj = match cfg.method {
        MethodSpec::Bpm => run_bpm(
            &objective,
            &norm,
            &x0,
            &schedule,
            &cfg.solver,
            cfg.iters,
            cfg.stop_tol,
        )?,
        MethodSpec::Linearized => run_linearized(&objective, &norm, &x0, &schedule, cfg.iters)?,
    };
    Ok((traj, objective))
}

fn cmd_run(config: &Path, out: &OutDir) -> Result<bool, Error> {
    let (cfg, base) = load_config(config)?;
    let (traj, objective) = execute(&cfg, &base)?;
    let report = certify_all(&traj, &objective)?;
    let dir = resolve_out(out, cfg.out_dir.as_ref());
    write_out(&dir, "trajectory.csv", &trajectory_csv(&traj, objective.known_optimum().as_ref()))?;
    write_out(&dir, "certificates.csv", &certificates_csv(&report))?;
    let text = certificates_text(&report);
    write_out(&dir, "certificates.txt", &text)?;
    print!("{text}");
    Ok(report.all_pass())
}

fn cmd_certify(trajectory: &Path, config: &Path, out: &OutDir) -> Result<bool, Error> {
    let (cfg, base) = load_config(config)?;
    let (traj, objective) = execute(&cfg, &base)?;
    let replayed = trajectory_csv(&traj, objective.known_optimum().as_ref());
    let recorded = std::fs::read_to_string(trajectory)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", trajectory.display())))?;
    if replayed.trim_end() != recorded.trim_end() {
        return Err(Error::Config(format!(
            "{} does not match a deterministic replay of {}",
            trajectory.display(),
            config.display()
        )));
    }
    let report = certify_all(&traj, &objective)?;
    let dir = resolve_out(out, cfg.out_dir.as_ref());
    write_out(&dir, "certificates.csv", &certificates_csv(&report))?;
    let text = certificates_text(&report);
    write_out(&dir, "certificates.txt", &text)?;
    print!("{text}");
    Ok(report.all_pass())
}

fn cmd_lmo_table(
    dims: &str,
    norms: &str,
    seed: u64,
    trials: usize,
    out: &OutDir,
) -> Result<(), Error> {
    let dims: Vec<usize> = dims
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| Error::Config(format!("bad dimension '{t}'")))
        })
        .collect::<Result<_, _>>()?;
    let tokens: Vec<&str> = norms.split(',').map(str::trim).collect();

    let mut csv = String::new();
    csv.push_str(SCHEMA_LINE);
    csv.push('\n');
    csv.push_str("norm,dim,trial,g,lmo,dot_g_lmo,neg_dual_norm\n");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let join = |v: &DVector<f64>| {
        v.iter().map(|x| fmt_float(*x)).collect::<Vec<_>>().join(";")
    };
    for token in &tokens {
        let spec = NormSpec::parse(token)?;
        let norm_dims: Vec<usize> = match &spec {
            NormSpec::Spectral(m, n) => vec![m * n],
            NormSpec::Ellipsoid(_) => {
                return Err(Error::Config(
                    "ellipsoid norms are not supported in lmo-table".to_string(),
                ))
            }
            _ => dims.clone(),
        };
        for d in norm_dims {
            let descriptor = spec.to_descriptor(d, Path::new("."))?;
            for trial in 0..trials {
                let g = DVector::from_fn(d, |_, _| rng.random_range(-3.0..3.0));
                let u = descriptor.lmo(&g)?;
                let dual = descriptor.dual_value(&g)?;
                csv.push_str(&format!(
                    "{},{},{},{},{},{},{}\n",
                    token,
                    d,
                    trial,
                    join(&g),
                    join(&u),
                    fmt_float(g.dot(&u)),
                    fmt_float(-dual),
                ));
            }
        }
    }
    let dir = resolve_out(out, None);
    let path = write_out(&dir, "lmo_table.csv", &csv)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn cmd_counterexample(seed_start: u64, seed_count: u64, out: &OutDir) -> Result<(), Error> {
    let rec = find_linf_distance_increase(seed_start..seed_start + seed_count, 2)?;
    let dir = resolve_out(out, None);
    let fixture = write_out(&dir, "counterexample.config", &counterexample_fixture(&rec))?;
    write_out(&dir, "counterexample.csv", &counterexample_csv(&rec))?;
    println!(
        "seed {}: |x1 - x*|_inf = {} > {} = |x0 - x*|_inf (radius {})",
        rec.seed,
        fmt_float(rec.dist_after),
        fmt_float(rec.dist_before),
        fmt_float(rec.radius)
    );
    println!("wrote {}", fixture.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome: Result<bool, Error> = match &cli.command {
        Command::Run { config, out } => cmd_run(config, out),
        Command::Certify { trajectory, config, out } => cmd_certify(trajectory, config, out),
        Command::LmoTable { dims, norms, seed, trials, out } => {
            cmd_lmo_table(dims, norms, *seed, *trials, out).map(|()| true)
        }
        Command::Counterexample { seed_start, seed_count, out } => {
            cmd_counterexample(*seed_start, *seed_count, out).map(|()| true)
        }
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(err) => {
            if let Some(step) = err.step_index() {
                eprintln!("error at step {step}: {err}");
            } else {
                eprintln!("error: {err}");
            }
            ExitCode::from(exit_code_for(&err))
        }
    }
}

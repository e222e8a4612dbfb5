//! Flat key/value experiment configuration.
//!
//! The format is one `key = value` pair per line, `#` comments, optional
//! double quotes around values, no nesting. Configs round-trip losslessly
//! through [`ExperimentConfig::to_config_string`]. Referenced CSV files are
//! resolved relative to the config file's directory.

use std::path::{Path, PathBuf};

use nalgebra::{DMatrix, DVector};

use crate::broximal::SolverConfig;
use crate::error::{Error, Result};
use crate::geometry::NormDescriptor;
use crate::methods::RadiusSchedule;
use crate::problems::{make_least_squares, make_logistic, make_quadratic, Objective};
use crate::report::fmt_float;

#[derive(Clone, Debug, PartialEq)]
pub enum ProblemSpec {
    Quadratic { eigenvalues: Vec<f64>, xstar: Vec<f64>, fstar: f64 },
    LeastSquares { matrix_csv: String, rhs_csv: String },
    Logistic { features_csv: String, labels_csv: String, ridge: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub enum NormSpec {
    L1,
    L2,
    LInf,
    Lp(f64),
    Ellipsoid(String),
    Spectral(usize, usize),
}

impl NormSpec {
    pub fn parse(token: &str) -> Result<Self> {
        match token {
            "l1" => Ok(NormSpec::L1),
            "l2" => Ok(NormSpec::L2),
            "linf" => Ok(NormSpec::LInf),
            _ => {
                if let Some(p) = token.strip_prefix("lp:") {
                    let p: f64 = p
                        .parse()
                        .map_err(|_| Error::Config(format!("bad lp exponent in '{token}'")))?;
                    Ok(NormSpec::Lp(p))
                } else if let Some(path) = token.strip_prefix("ellipsoid:") {
                    Ok(NormSpec::Ellipsoid(path.to_string()))
                } else if let Some(shape) = token.strip_prefix("spectral:") {
                    let (m, n) = shape
                        .split_once('x')
                        .ok_or_else(|| Error::Config(format!("bad spectral shape in '{token}'")))?;
                    let rows = m
                        .parse()
                        .map_err(|_| Error::Config(format!("bad spectral rows in '{token}'")))?;
                    let cols = n
                        .parse()
                        .map_err(|_| Error::Config(format!("bad spectral cols in '{token}'")))?;
                    Ok(NormSpec::Spectral(rows, cols))
                } else {
                    Err(Error::Config(format!("unknown norm '{token}'")))
                }
            }
        }
    }

    pub fn token(&self) -> String {
        match self {
            NormSpec::L1 => "l1".to_string(),
            NormSpec::L2 => "l2".to_string(),
            NormSpec::LInf => "linf".to_string(),
            NormSpec::Lp(p) => format!("lp:{p}"),
            NormSpec::Ellipsoid(path) => format!("ellipsoid:{path}"),
            NormSpec::Spectral(m, n) => format!("spectral:{m}x{n}"),
        }
    }

    /// Builds the descriptor for a problem of dimension `dim`, resolving any
    /// matrix path against `base`.
    pub fn to_descriptor(&self, dim: usize, base: &Path) -> Result<NormDescriptor> {
        let check = |n: NormDescriptor| {
            if n.dim() == dim {
                Ok(n)
            } else {
                Err(Error::Config(format!(
                    "norm dimension {} does not match problem dimension {dim}",
                    n.dim()
                )))
            }
        };
        match self {
            NormSpec::L1 => check(NormDescriptor::l1(dim)),
            NormSpec::L2 => check(NormDescriptor::l2(dim)),
            NormSpec::LInf => check(NormDescriptor::linf(dim)),
            NormSpec::Lp(p) => check(NormDescriptor::lp(dim, *p)?),
            NormSpec::Ellipsoid(path) => {
                let m = load_matrix_csv(&base.join(path))?;
                check(NormDescriptor::ellipsoid(m)?)
            }
            NormSpec::Spectral(rows, cols) => check(NormDescriptor::spectral(*rows, *cols)?),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MethodSpec {
    Bpm,
    Linearized,
}

#[derive(Clone, Debug, PartialEq)]
pub enum RadiusSpec {
    Const(f64),
    Explicit(Vec<f64>),
    Polyak,
}

impl RadiusSpec {
    pub fn parse(token: &str) -> Result<Self> {
        if token == "polyak" {
            Ok(RadiusSpec::Polyak)
        } else if let Some(t) = token.strip_prefix("const:") {
            Ok(RadiusSpec::Const(t.parse().map_err(|_| {
                Error::Config(format!("bad constant radius in '{token}'"))
            })?))
        } else if let Some(list) = token.strip_prefix("explicit:") {
            Ok(RadiusSpec::Explicit(parse_f64_list(list)?))
        } else {
            Err(Error::Config(format!("unknown radius schedule '{token}'")))
        }
    }

    pub fn token(&self) -> String {
        match self {
            RadiusSpec::Const(t) => format!("const:{}", fmt_float(*t)),
            RadiusSpec::Explicit(ts) => format!(
                "explicit:{}",
                ts.iter().map(|t| fmt_float(*t)).collect::<Vec<_>>().join(",")
            ),
            RadiusSpec::Polyak => "polyak".to_string(),
        }
    }

    pub fn to_schedule(&self) -> RadiusSchedule {
        match self {
            RadiusSpec::Const(t) => RadiusSchedule::Constant(*t),
            RadiusSpec::Explicit(ts) => RadiusSchedule::Explicit(ts.clone()),
            RadiusSpec::Polyak => RadiusSchedule::Polyak,
        }
    }
}

/// One experiment: problem, geometry, method, schedule, budgets and seeds.
/// Seeds are always explicit; nothing here depends on wall-clock entropy.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub problem: ProblemSpec,
    pub norm: NormSpec,
    pub method: MethodSpec,
    pub radius: RadiusSpec,
    pub iters: usize,
    pub stop_tol: f64,
    pub seed: u64,
    pub solver: SolverConfig,
    pub x0: Vec<f64>,
    pub out_dir: Option<String>,
}

fn parse_f64_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("bad number '{t}'")))
        })
        .collect()
}

fn strip_quotes(s: &str) -> &str {
    s.strip_prefix('"')
        .and_then(|t| t.strip_suffix('"'))
        .unwrap_or(s)
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut pairs: Vec<(String, String)> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected 'key = value'", idx + 1))
            })?;
            let key = key.trim().to_string();
            if pairs.iter().any(|(k, _)| *k == key) {
                return Err(Error::Config(format!("duplicate key '{key}'")));
            }
            pairs.push((key, strip_quotes(value.trim()).to_string()));
        }
        let mut get = |key: &str| -> Option<String> {
            pairs
                .iter()
                .position(|(k, _)| k == key)
                .map(|i| pairs.remove(i).1)
        };

        let problem_kind = get("problem")
            .ok_or_else(|| Error::Config("missing key 'problem'".to_string()))?;
        let problem = match problem_kind.as_str() {
            "quadratic" => ProblemSpec::Quadratic {
                eigenvalues: parse_f64_list(
                    &get("eigenvalues")
                        .ok_or_else(|| Error::Config("missing key 'eigenvalues'".to_string()))?,
                )?,
                xstar: parse_f64_list(
                    &get("xstar")
                        .ok_or_else(|| Error::Config("missing key 'xstar'".to_string()))?,
                )?,
                fstar: parse_key_f64(&mut get, "fstar")?.unwrap_or(0.0),
            },
            "least_squares" => ProblemSpec::LeastSquares {
                matrix_csv: get("matrix_csv")
                    .ok_or_else(|| Error::Config("missing key 'matrix_csv'".to_string()))?,
                rhs_csv: get("rhs_csv")
                    .ok_or_else(|| Error::Config("missing key 'rhs_csv'".to_string()))?,
            },
            "logistic" => ProblemSpec::Logistic {
                features_csv: get("features_csv")
                    .ok_or_else(|| Error::Config("missing key 'features_csv'".to_string()))?,
                labels_csv: get("labels_csv")
                    .ok_or_else(|| Error::Config("missing key 'labels_csv'".to_string()))?,
                ridge: parse_key_f64(&mut get, "ridge")?.unwrap_or(0.0),
            },
            other => return Err(Error::Config(format!("unknown problem '{other}'"))),
        };

        let norm = NormSpec::parse(
            &get("norm").ok_or_else(|| Error::Config("missing key 'norm'".to_string()))?,
        )?;
        let method = match get("method")
            .ok_or_else(|| Error::Config("missing key 'method'".to_string()))?
            .as_str()
        {
            "bpm" => MethodSpec::Bpm,
            "linearized" => MethodSpec::Linearized,
            other => return Err(Error::Config(format!("unknown method '{other}'"))),
        };
        let radius = RadiusSpec::parse(
            &get("radius").ok_or_else(|| Error::Config("missing key 'radius'".to_string()))?,
        )?;
        let iters: usize = get("iters")
            .ok_or_else(|| Error::Config("missing key 'iters'".to_string()))?
            .parse()
            .map_err(|_| Error::Config("bad 'iters' value".to_string()))?;
        let x0 = parse_f64_list(
            &get("x0").ok_or_else(|| Error::Config("missing key 'x0'".to_string()))?,
        )?;
        let stop_tol = parse_key_f64(&mut get, "stop_tol")?.unwrap_or(1e-12);
        let seed: u64 = match get("seed") {
            Some(s) => s
                .parse()
                .map_err(|_| Error::Config("bad 'seed' value".to_string()))?,
            None => 0,
        };

        let defaults = SolverConfig::default();
        let solver = SolverConfig {
            tol: parse_key_f64(&mut get, "brox.tol")?.unwrap_or(defaults.tol),
            fw_max_iters: match get("brox.fw_max_iters") {
                Some(s) => s
                    .parse()
                    .map_err(|_| Error::Config("bad 'brox.fw_max_iters' value".to_string()))?,
                None => defaults.fw_max_iters,
            },
            fw_gap_tol: parse_key_f64(&mut get, "brox.fw_gap_tol")?.unwrap_or(defaults.fw_gap_tol),
            grid_resolution: parse_key_f64(&mut get, "brox.grid_resolution")?
                .unwrap_or(defaults.grid_resolution),
        };
        let out_dir = get("out_dir");

        if let Some((key, _)) = pairs.first() {
            return Err(Error::Config(format!("unknown key '{key}'")));
        }

        Ok(ExperimentConfig {
            problem,
            norm,
            method,
            radius,
            iters,
            stop_tol,
            seed,
            solver,
            x0,
            out_dir,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Canonical serialization; parsing it back reproduces the config.
    pub fn to_config_string(&self) -> String {
        let mut out = String::new();
        match &self.problem {
            ProblemSpec::Quadratic { eigenvalues, xstar, fstar } => {
                out.push_str("problem = \"quadratic\"\n");
                out.push_str(&format!("eigenvalues = {}\n", join_floats(eigenvalues)));
                out.push_str(&format!("xstar = {}\n", join_floats(xstar)));
                out.push_str(&format!("fstar = {}\n", fmt_float(*fstar)));
            }
            ProblemSpec::LeastSquares { matrix_csv, rhs_csv } => {
                out.push_str("problem = \"least_squares\"\n");
                out.push_str(&format!("matrix_csv = \"{matrix_csv}\"\n"));
                out.push_str(&format!("rhs_csv = \"{rhs_csv}\"\n"));
            }
            ProblemSpec::Logistic { features_csv, labels_csv, ridge } => {
                out.push_str("problem = \"logistic\"\n");
                out.push_str(&format!("features_csv = \"{features_csv}\"\n"));
                out.push_str(&format!("labels_csv = \"{labels_csv}\"\n"));
                out.push_str(&format!("ridge = {}\n", fmt_float(*ridge)));
            }
        }
        out.push_str(&format!("norm = \"{}\"\n", self.norm.token()));
        out.push_str(&format!(
            "method = \"{}\"\n",
            match self.method {
                MethodSpec::Bpm => "bpm",
                MethodSpec::Linearized => "linearized",
            }
        ));
        out.push_str(&format!("radius = \"{}\"\n", self.radius.token()));
        out.push_str(&format!("iters = {}\n", self.iters));
        out.push_str(&format!("stop_tol = {}\n", fmt_float(self.stop_tol)));
        out.push_str(&format!("seed = {}\n", self.seed));
        out.push_str(&format!("x0 = {}\n", join_floats(&self.x0)));
        out.push_str(&format!("brox.tol = {}\n", fmt_float(self.solver.tol)));
        out.push_str(&format!("brox.fw_max_iters = {}\n", self.solver.fw_max_iters));
        out.push_str(&format!(
            "brox.fw_gap_tol = {}\n",
            fmt_float(self.solver.fw_gap_tol)
        ));
        out.push_str(&format!(
            "brox.grid_resolution = {}\n",
            fmt_float(self.solver.grid_resolution)
        ));
        if let Some(dir) = &self.out_dir {
            out.push_str(&format!("out_dir = \"{dir}\"\n"));
        }
        out
    }

    /// Instantiates the objective, resolving data files against `base`.
    pub fn build_objective(&self, base: &Path) -> Result<Objective> {
        match &self.problem {
            ProblemSpec::Quadratic { eigenvalues, xstar, fstar } => Ok(Objective::Quadratic(
                make_quadratic(
                    eigenvalues,
                    self.seed,
                    DVector::from_column_slice(xstar),
                    *fstar,
                )?,
            )),
            ProblemSpec::LeastSquares { matrix_csv, rhs_csv } => {
                let m = load_matrix_csv(&base.join(matrix_csv))?;
                let y = load_vector_csv(&base.join(rhs_csv))?;
                make_least_squares(m, y)
            }
            ProblemSpec::Logistic { features_csv, labels_csv, ridge } => {
                let features = load_matrix_csv(&base.join(features_csv))?;
                let labels = load_vector_csv(&base.join(labels_csv))?;
                make_logistic(features, labels.as_slice(), *ridge)
            }
        }
    }

    pub fn build_norm(&self, base: &Path) -> Result<NormDescriptor> {
        self.norm.to_descriptor(self.x0.len(), base)
    }

    pub fn starting_point(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.x0)
    }

    /// Checks that every referenced data file exists under `base`.
    pub fn validate_files(&self, base: &Path) -> Result<()> {
        let mut paths: Vec<&String> = Vec::new();
        match &self.problem {
            ProblemSpec::LeastSquares { matrix_csv, rhs_csv } => {
                paths.push(matrix_csv);
                paths.push(rhs_csv);
            }
            ProblemSpec::Logistic { features_csv, labels_csv, .. } => {
                paths.push(features_csv);
                paths.push(labels_csv);
            }
            ProblemSpec::Quadratic { .. } => {}
        }
        if let NormSpec::Ellipsoid(path) = &self.norm {
            paths.push(path);
        }
        for p in paths {
            let full: PathBuf = base.join(p);
            if !full.exists() {
                return Err(Error::Config(format!(
                    "referenced file does not exist: {}",
                    full.display()
                )));
            }
        }
        Ok(())
    }
}

fn parse_key_f64(
    get: &mut impl FnMut(&str) -> Option<String>,
    key: &str,
) -> Result<Option<f64>> {
    match get(key) {
        Some(s) => s
            .parse::<f64>()
            .map(Some)
            .map_err(|_| Error::Config(format!("bad '{key}' value '{s}'"))),
        None => Ok(None),
    }
}

fn join_floats(v: &[f64]) -> String {
    v.iter().map(|x| fmt_float(*x)).collect::<Vec<_>>().join(",")
}

/// Reads a dense matrix from CSV: one row per line, `#` comments allowed.
pub fn load_matrix_csv(path: &Path) -> Result<DMatrix<f64>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        rows.push(parse_f64_list(line)?);
    }
    if rows.is_empty() {
        return Err(Error::Config(format!("{}: empty matrix", path.display())));
    }
    let cols = rows[0].len();
    if rows.iter().any(|r| r.len() != cols) {
        return Err(Error::Config(format!("{}: ragged rows", path.display())));
    }
    let flat: Vec<f64> = rows.iter().flatten().copied().collect();
    Ok(DMatrix::from_row_slice(rows.len(), cols, &flat))
}

/// Reads a vector from CSV: one value per line or a single comma-separated
/// line.
pub fn load_vector_csv(path: &Path) -> Result<DVector<f64>> {
    let m = load_matrix_csv(path)?;
    if m.ncols() == 1 {
        Ok(DVector::from_column_slice(m.column(0).as_slice()))
    } else if m.nrows() == 1 {
        Ok(m.row(0).transpose())
    } else {
        Err(Error::Config(format!(
            "{}: expected a vector, got {}x{}",
            path.display(),
            m.nrows(),
            m.ncols()
        )))
    }
}

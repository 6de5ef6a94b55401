//! The `parabolic` command: decide whether a quasilinear parabolic system
//! can be brought to diffusion form by a change of dependent variables,
//! build that change numerically, or apply a given one.
//!
//! Exit codes: 0 reducible, 1 not reducible, 2 degenerate, 3 bad usage or
//! input, 4 file errors, 5 computation failures.

pub mod error;
pub mod problem;
pub mod report;
pub mod transform_file;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use parabolic_core::criterion::{decide, DRoute, Status};
use parabolic_core::geometry::{pull_back_connection, pull_back_operator, transform_system, Chart};
use parabolic_core::pfaff::{integrate_t, verify_diffusion_form, write_table, GridSpec};
use parabolic_core::polyalg::Matrix;
use parabolic_core::scalar::rational_to_float;
use parabolic_core::Rational;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use error::CliError;
pub use problem::ProblemFile;
pub use report::Report;
pub use transform_file::TransformFile;

/// Half-width of the grid around the base point when none is given.
pub const DEFAULT_RADIUS: f64 = 0.25;
pub const DEFAULT_POINTS: usize = 9;
/// Points checked by `reduce` when `--seed` asks for a random sample.
pub const PROBE_SAMPLES: usize = 32;

#[derive(Parser, Debug)]
#[command(name = "parabolic", version, about = "Reduction of quasilinear parabolic systems to diffusion form")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Decide reducibility at the base point.
    Check(CommonArgs),
    /// Integrate the change of variables on a grid.
    Reduce(ReduceArgs),
    /// Apply a change of variables to a problem file.
    Transform(TransformArgs),
}

#[derive(Args, Debug, Clone)]
pub struct CommonArgs {
    /// Problem file (TOML).
    #[arg(long, short)]
    pub input: PathBuf,
    /// Write the report or table here instead of stdout.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Human)]
    pub format: Format,
    #[arg(long = "d-route", value_enum)]
    pub d_route: Option<RouteArg>,
    /// Base point "r1,...,rn"; overrides the file.
    #[arg(long)]
    pub base: Option<String>,
}

#[derive(Args, Debug, Clone)]
pub struct ReduceArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// "lo1:hi1:k1,...", k points per axis.
    #[arg(long)]
    pub grid: Option<String>,
    /// Largest integration step on every axis.
    #[arg(long)]
    pub step: Option<f64>,
    /// Check a random sample of grid points instead of all of them.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Args, Debug, Clone)]
pub struct TransformArgs {
    /// Problem file (TOML).
    #[arg(long, short)]
    pub input: PathBuf,
    /// Transform file (TOML).
    #[arg(long, short)]
    pub transform: PathBuf,
    /// Write the transformed problem here instead of stdout.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Treat the problem as living in the target variables and pull it
    /// back to the source variables.
    #[arg(long)]
    pub pullback: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Human,
    Machine,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum RouteArg {
    Solve,
    Cayley,
    Both,
}

impl From<RouteArg> for DRoute {
    fn from(r: RouteArg) -> Self {
        match r {
            RouteArg::Solve => DRoute::Solve,
            RouteArg::Cayley => DRoute::Cayley,
            RouteArg::Both => DRoute::Both,
        }
    }
}

/// Parses arguments (program name first), runs, and returns the exit
/// code. Normal output goes to `out`, diagnostics to `err`.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            // --help and --version are not errors
            if e.use_stderr() {
                let _ = write!(err, "{e}");
                return 3;
            }
            let _ = write!(out, "{e}");
            return 0;
        }
    };
    let result = match &cli.command {
        Command::Check(a) => cmd_check(a, out, err),
        Command::Reduce(a) => cmd_reduce(a, out, err),
        Command::Transform(a) => cmd_transform(a, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, text: &[u8]) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), CliError> {
    out.write_all(text.as_bytes()).map_err(|e| CliError::Io(e.to_string()))
}

/// Loads the problem and applies the flag overrides.
pub fn load_problem(args: &CommonArgs) -> Result<(ProblemFile, DRoute), CliError> {
    let mut problem = ProblemFile::parse(&read(&args.input)?)
        .map_err(|e| CliError::Input(format!("{}: {e}", args.input.display())))?;
    if let Some(b) = &args.base {
        problem.base = b
            .split(',')
            .enumerate()
            .map(|(i, s)| {
                problem::parse_rational(s)
                    .ok_or_else(|| CliError::Usage(format!("--base coordinate {} `{}` is not rational", i + 1, s.trim())))
            })
            .collect::<Result<_, _>>()?;
        problem.check_base()?;
    }
    let route = args
        .d_route
        .map(DRoute::from)
        .or(problem.options.d_route)
        .unwrap_or_default();
    Ok((problem, route))
}

pub fn cmd_check(args: &CommonArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    let (problem, route) = load_problem(args)?;
    let start = Instant::now();
    let verdict = decide(&problem.a, &problem.gamma, &problem.base, route)?;
    let elapsed = start.elapsed();
    let report = Report::new(&verdict, &problem.vars, route);
    let text = match args.format {
        Format::Human => report.to_human(),
        Format::Machine => report.to_json(),
    };
    match &args.output {
        Some(path) => write_file(path, text.as_bytes())?,
        None => emit(out, &text)?,
    }
    let _ = writeln!(err, "decided in {:.3} s", elapsed.as_secs_f64());
    Ok(report.exit_code)
}

/// Summary of a `reduce` run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReduceSummary {
    pub status: String,
    pub points: usize,
    pub dropped: usize,
    pub steps: Vec<f64>,
    pub compatibility_residual: f64,
    pub estimated_error: f64,
    pub diffusion_residual: f64,
    pub checked_points: usize,
    pub table: Option<PathBuf>,
}

pub fn cmd_reduce(args: &ReduceArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    let (problem, route) = load_problem(&args.common)?;
    let n = problem.dim();
    let verdict = decide(&problem.a, &problem.gamma, &problem.base, route)?;
    if verdict.status != Status::Reducible {
        let code = report::exit_code(verdict.status);
        let _ = writeln!(err, "refusing to integrate: system is {}", verdict.status.name());
        return Ok(code);
    }
    let theta = verdict.theta.expect("reducible verdicts carry θ");
    let grid = match args.grid.as_ref().or(problem.options.grid.as_ref()) {
        Some(g) => GridSpec::parse(g).map_err(|e| CliError::Usage(e.to_string()))?,
        None => {
            let centre: Vec<f64> = problem.base.iter().map(rational_to_float::<f64>).collect();
            GridSpec::around(&centre, DEFAULT_RADIUS, DEFAULT_POINTS)?
        }
    };
    let steps = args.step.or(problem.options.step).map(|h| vec![h; n]);
    let sol = integrate_t::<f64>(&theta, &problem.base, &Matrix::identity(n), &grid, steps.as_deref())?;
    for d in &sol.dropped {
        let _ = writeln!(err, "dropped {:?}: {}", d.y, d.reason);
    }
    let samples: Option<Vec<usize>> = args.seed.map(|seed| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let count = PROBE_SAMPLES.min(sol.points.len());
        let mut picked = sample(&mut rng, sol.points.len(), count).into_vec();
        picked.sort_unstable();
        picked
    });
    let check = verify_diffusion_form(&problem.a, &problem.gamma, &theta, &sol, samples.as_deref())?;

    let target = args.common.output.clone().or(problem.options.output.clone());
    let mut table = Vec::new();
    write_table(&sol, problem.vars.names(), &mut table).map_err(|e| CliError::Io(e.to_string()))?;
    let summary = ReduceSummary {
        status: verdict.status.name().to_string(),
        points: sol.points.len(),
        dropped: sol.dropped.len(),
        steps: sol.steps.clone(),
        compatibility_residual: sol.compatibility_residual,
        estimated_error: sol.estimated_error,
        diffusion_residual: check.max_residual,
        checked_points: check.per_point.len(),
        table: target.clone(),
    };
    let text = match args.common.format {
        Format::Machine => serde_json::to_string_pretty(&summary).expect("summary serializes") + "\n",
        Format::Human => format!(
            "points: {} retained, {} dropped\nstep: {}\ncompatibility residual: {:.3e}\nestimated error: {:.3e}\ndiffusion-form residual: {:.3e} over {} points\n",
            summary.points,
            summary.dropped,
            summary.steps.iter().map(|h| h.to_string()).collect::<Vec<_>>().join(", "),
            summary.compatibility_residual,
            summary.estimated_error,
            summary.diffusion_residual,
            summary.checked_points
        ),
    };
    match target {
        Some(path) => {
            write_file(&path, &table)?;
            emit(out, &text)?;
        }
        None => {
            // the table owns stdout
            out.write_all(&table).map_err(|e| CliError::Io(e.to_string()))?;
            let _ = err.write_all(text.as_bytes());
        }
    }
    Ok(0)
}

pub fn cmd_transform(args: &TransformArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let problem = ProblemFile::parse(&read(&args.input)?)
        .map_err(|e| CliError::Input(format!("{}: {e}", args.input.display())))?;
    let tf = TransformFile::parse(&read(&args.transform)?, &problem.vars)
        .map_err(|e| CliError::Input(format!("{}: {e}", args.transform.display())))?;
    if tf.transform.dim() != problem.dim() {
        return Err(CliError::Input(format!(
            "transform has {} components, problem has dimension {}",
            tf.transform.dim(),
            problem.dim()
        )));
    }
    let phi = &tf.transform;
    let (vars, a, gamma, base) = if args.pullback {
        let inverse = phi
            .inverse()
            .ok_or_else(|| CliError::Input("pulling back the base point needs the inverse map".into()))?;
        let base = eval_point(inverse, &problem.base)?;
        let a = pull_back_operator(&problem.a, phi)?;
        let gamma = pull_back_connection(&problem.gamma, phi)?;
        (tf.source, a, gamma, base)
    } else {
        let (a, gamma, chart) = transform_system(&problem.a, &problem.gamma, phi)?;
        if chart != Chart::Target {
            return Err(CliError::Input(
                "a nonlinear transform needs its inverse to express the result in the new variables".into(),
            ));
        }
        let base = eval_point(phi.forward(), &problem.base)?;
        (tf.target, a, gamma, base)
    };
    let mut options = problem.options.clone();
    // a grid in the old coordinates means nothing in the new ones
    options.grid = None;
    let result = ProblemFile {
        vars,
        a,
        gamma,
        base,
        options,
    };
    result.check_base()?;
    let text = result.to_text();
    match &args.output {
        Some(path) => write_file(path, text.as_bytes())?,
        None => emit(out, &text)?,
    }
    Ok(0)
}

fn eval_point(map: &[parabolic_core::Expr], point: &[Rational]) -> Result<Vec<Rational>, CliError> {
    map.iter()
        .map(|e| e.eval(point).map_err(|_| CliError::Input("the map has a pole at the base point".into())))
        .collect()
}

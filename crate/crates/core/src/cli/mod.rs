//! `kbeam` command-line front end.
//!
//! Every run writes a JSON report `{config, result, solution_csv_path,
//! timing_ms}`; solution CSVs have columns `x,u,w`, sweep CSVs
//! `lambda,sup_norm,R,iterations,status`. Both CSV kinds start with a
//! `# config ...` line echoing the parsed configuration.
//!
//! Exit codes: 0 converged, 1 verification failed, 2 theory-forbidden input,
//! 3 convergence failure, 4 invalid configuration or malformed input.

mod csv_io;
mod verify;

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::continuation::{self, BranchSample, SampleStatus};
use crate::eigen;
use crate::error::Error;
use crate::linear_core::{self, ProblemParams};
use crate::nonlocal_solver::{self, NonlocalOptions};
use crate::numerics::{Grid, GridFunction, DEFAULT_NODES};
use crate::sublinear_solver::{self, InnerOptions, NonlinearitySpec, SublinearOptions};

pub use csv_io::{read_solution_csv, write_solution_csv, write_sweep_csv, SolutionTable};
pub use verify::{verify_report, CheckResult, VerifyReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_FORBIDDEN: i32 = 2;
pub const EXIT_NO_CONVERGENCE: i32 = 3;
pub const EXIT_INVALID: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "kbeam", version, about = "Solvers for the hinged Kirchhoff beam equation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Frozen-coefficient problem u'''' - (a + bR) u'' = g.
    SolveLinear(RunArgs),
    /// Nonlocal problem with a built-in right-hand side g.
    SolveNonlocal(RunArgs),
    /// Closed-form positive solution for f(u) = u.
    SolveEigen(RunArgs),
    /// Positive solution for f(u) = c1 u^p + c2 u^q.
    SolveSublinear(RunArgs),
    /// Tabulate a positive-solution branch over λ.
    Sweep(RunArgs),
    /// Re-check a report and its solution CSV.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum CommandName {
    SolveLinear,
    SolveNonlocal,
    SolveEigen,
    SolveSublinear,
    Sweep,
    Verify,
}

/// Built-in right-hand sides.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum BuiltinLoad {
    SinPi,
    Const,
    NegSinPi,
    Zero,
}

impl BuiltinLoad {
    pub fn sample(self, grid: Grid) -> GridFunction {
        match self {
            BuiltinLoad::SinPi => GridFunction::from_fn(grid, |x| (PI * x).sin()),
            BuiltinLoad::NegSinPi => GridFunction::from_fn(grid, |x| -(PI * x).sin()),
            BuiltinLoad::Const => GridFunction::constant(grid, 1.0),
            BuiltinLoad::Zero => GridFunction::zeros(grid),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    Eigen,
    Sublinear,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Spacing {
    Linear,
    Log,
}

/// Flags shared by the solve and sweep commands.
#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunArgs {
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub a: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub b: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub lambda: f64,
    /// Grid node count (odd, >= 33).
    #[arg(long, default_value_t = DEFAULT_NODES)]
    pub n: usize,

    #[arg(long, value_enum, default_value_t = BuiltinLoad::SinPi)]
    pub g: BuiltinLoad,
    /// Frozen R for solve-linear.
    #[arg(long = "r", default_value_t = 0.0, allow_hyphen_values = true)]
    pub r: f64,

    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub c1: f64,
    #[arg(long, default_value_t = 0.5, allow_hyphen_values = true)]
    pub p: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub c2: f64,
    #[arg(long, default_value_t = 0.5, allow_hyphen_values = true)]
    pub q: f64,

    /// Outer fixed-point tolerance (defaults: 1e-10 nonlocal, 1e-8 sublinear).
    #[arg(long)]
    pub tol_r: Option<f64>,
    #[arg(long, default_value_t = sublinear_solver::DEFAULT_INNER_TOL)]
    pub inner_tol: f64,
    #[arg(long, default_value_t = sublinear_solver::DEFAULT_MAX_INNER)]
    pub max_inner: usize,

    #[arg(long, value_enum, default_value_t = Branch::Sublinear)]
    pub branch: Branch,
    /// Explicit λ values for sweep (comma separated).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub lambdas: Option<Vec<f64>>,
    #[arg(long, allow_hyphen_values = true)]
    pub lambda_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub lambda_max: Option<f64>,
    #[arg(long, default_value_t = 13)]
    pub points: usize,
    #[arg(long, value_enum, default_value_t = Spacing::Log)]
    pub spacing: Spacing,

    /// JSON report path (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Solution CSV (x,u,w) or, for sweep, branch CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Args, Clone, Debug)]
pub struct VerifyArgs {
    /// JSON report written by a solve command.
    #[arg(long)]
    pub report: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parsed configuration, echoed into every output file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: CommandName,
    #[serde(flatten)]
    pub args: RunArgs,
}

impl RunConfig {
    pub fn params(&self) -> Result<ProblemParams, Error> {
        ProblemParams::new(self.args.a, self.args.b, self.args.lambda)
    }

    pub fn grid(&self) -> Result<Grid, Error> {
        Grid::new(self.args.n)
    }

    pub fn nonlinearity(&self) -> Result<NonlinearitySpec, Error> {
        NonlinearitySpec::power_sum(self.args.c1, self.args.p, self.args.c2, self.args.q)
    }

    pub fn tol_r(&self) -> f64 {
        self.args.tol_r.unwrap_or(match self.command {
            CommandName::SolveSublinear | CommandName::Sweep => sublinear_solver::DEFAULT_TOL_R,
            _ => nonlocal_solver::DEFAULT_TOL_R,
        })
    }

    fn sublinear_options(&self) -> SublinearOptions {
        SublinearOptions {
            tol_r: self.tol_r(),
            inner: InnerOptions {
                tol: self.args.inner_tol,
                max_iter: self.args.max_inner,
                ..Default::default()
            },
            ..Default::default()
        }
    }

    fn sweep_lambdas(&self) -> Result<Vec<f64>, Error> {
        if let Some(l) = &self.args.lambdas {
            return Ok(l.clone());
        }
        let (Some(lo), Some(hi)) = (self.args.lambda_min, self.args.lambda_max) else {
            return Err(Error::InvalidParams(
                "sweep needs --lambdas or both --lambda-min and --lambda-max".into(),
            ));
        };
        let n = self.args.points;
        match self.args.spacing {
            Spacing::Log if lo > 0.0 && hi > 0.0 => Ok(continuation::log_grid(lo, hi, n)),
            Spacing::Log => Err(Error::InvalidParams(
                "log spacing needs positive λ bounds".into(),
            )),
            Spacing::Linear => Ok(match n {
                0 => vec![],
                1 => vec![lo],
                _ => (0..n)
                    .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
                    .collect(),
            }),
        }
    }
}

/// Everything written by one run.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunReport {
    pub config: RunConfig,
    pub result: Value,
    pub solution_csv_path: Option<PathBuf>,
    pub timing_ms: f64,
}

pub struct RunOutcome {
    pub exit_code: i32,
    pub report: RunReport,
}

fn exit_code_for(e: &Error) -> i32 {
    if e.is_theory_forbidden() {
        EXIT_FORBIDDEN
    } else if e.is_convergence_failure() {
        EXIT_NO_CONVERGENCE
    } else {
        EXIT_INVALID
    }
}

fn status_for(e: &Error) -> &'static str {
    match e {
        Error::NoPositiveSolution(_) => "no_positive_solution",
        Error::ParameterDegenerate(_) => "parameter_degenerate",
        Error::ConvergenceFailure { .. } | Error::ProbeFailure(_) => "convergence_failure",
        _ => "invalid_config",
    }
}

fn error_result(e: &Error) -> Value {
    json!({
        "R": null,
        "sup_norm": null,
        "iterations": null,
        "residual": null,
        "status": status_for(e),
        "reason": e.to_string(),
    })
}

/// Solution written to the CSV alongside a JSON result.
struct Solved {
    result: Value,
    u: GridFunction,
    w: GridFunction,
}

fn solve_command(cfg: &RunConfig) -> Result<Solved, Error> {
    let grid = cfg.grid()?;
    let params = cfg.params()?;
    match cfg.command {
        CommandName::SolveLinear => {
            let g = cfg.args.g.sample(grid);
            let sol = linear_core::solve_fixed_r(&g, &params, cfg.args.r)?;
            let y = linear_core::y_of_r(&g, &params, cfg.args.r)?;
            let res = linear_core::residual(&sol.u, &g, &params, cfg.args.r);
            Ok(Solved {
                result: json!({
                    "R": cfg.args.r,
                    "sup_norm": sol.u.sup_norm(),
                    "iterations": 0,
                    "residual": res,
                    "status": "converged",
                    "energy": sol.energy,
                    "y": y,
                }),
                u: sol.u,
                w: sol.w,
            })
        }
        CommandName::SolveNonlocal => {
            let g = cfg.args.g.sample(grid);
            let opts = NonlocalOptions {
                tol_r: cfg.tol_r(),
                ..Default::default()
            };
            let rep = nonlocal_solver::solve_with_options(&g, &params, &opts)?;
            Ok(Solved {
                result: json!({
                    "R": rep.r,
                    "sup_norm": rep.u.sup_norm(),
                    "iterations": rep.iterations,
                    "residual": rep.residual,
                    "status": "converged",
                    "y": rep.y,
                    "energy": rep.energy,
                    "bracket": [rep.bracket.0, rep.bracket.1],
                    "cone_flag": rep.cone_flag,
                    "warning": rep.warning,
                }),
                u: rep.u,
                w: rep.w,
            })
        }
        CommandName::SolveEigen => {
            let sol = eigen::solve_nonlinear_eigen(&params, grid)?;
            let g = &sol.u * sol.lambda;
            let res = linear_core::residual(&sol.u, &g, &params, sol.t0);
            let w = sol.w();
            Ok(Solved {
                result: json!({
                    "R": sol.t0,
                    "sup_norm": sol.u.sup_norm(),
                    "iterations": 0,
                    "residual": res,
                    "status": "converged",
                    "lambda": sol.lambda,
                    "lambda_1a": eigen::principal_eigenvalue(sol.a)?,
                    "t0": sol.t0,
                    "c": sol.c,
                    "k": sol.k,
                    "energy": eigen::sampled_energy(&sol),
                }),
                u: sol.u,
                w,
            })
        }
        CommandName::SolveSublinear => {
            if params.lambda < 0.0 {
                // Theory rules this out whatever f is.
                return Err(Error::NoPositiveSolution(format!(
                    "λ = {} < 0 admits no positive solution",
                    params.lambda
                )));
            }
            let spec = cfg.nonlinearity()?;
            let rep =
                sublinear_solver::solve_with_options(&params, &spec, grid, &cfg.sublinear_options())?;
            Ok(Solved {
                result: json!({
                    "R": rep.r,
                    "sup_norm": rep.sup_norm(),
                    "iterations": rep.outer_iterations,
                    "residual": rep.residual,
                    "status": "converged",
                    "energy": rep.energy,
                    "energy_bound": sublinear_solver::energy_bound(&params, &spec, &rep.u),
                    "inner_iterations": rep.inner_iterations,
                    "bracket": [rep.bracket.0, rep.bracket.1],
                    "trivial": rep.trivial,
                    "nonlinearity": spec,
                }),
                u: rep.u,
                w: rep.w,
            })
        }
        CommandName::Sweep | CommandName::Verify => unreachable!("not a solve command"),
    }
}

fn sweep_command(cfg: &RunConfig) -> Result<(Value, Vec<BranchSample>), Error> {
    let grid = cfg.grid()?;
    let lambdas = cfg.sweep_lambdas()?;
    if lambdas.iter().any(|l| !l.is_finite()) {
        return Err(Error::InvalidParams("λ values must be finite".into()));
    }
    let samples = match cfg.args.branch {
        Branch::Eigen => {
            ProblemParams::new(cfg.args.a, cfg.args.b, 0.0)?;
            continuation::sweep_eigen(cfg.args.a, cfg.args.b, &lambdas, grid)
        }
        Branch::Sublinear => {
            ProblemParams::new(cfg.args.a, cfg.args.b, 0.0)?;
            let spec = cfg.nonlinearity()?;
            continuation::sweep_sublinear_with(
                cfg.args.a,
                cfg.args.b,
                &spec,
                &lambdas,
                grid,
                &cfg.sublinear_options(),
                crate::Exec::default(),
            )
        }
    };
    let count = |s: SampleStatus| samples.iter().filter(|x| x.status == s).count();
    let failed = count(SampleStatus::Failed);
    let result = json!({
        "R": null,
        "sup_norm": null,
        "iterations": null,
        "residual": null,
        "status": if failed == 0 { "converged" } else { "convergence_failure" },
        "points": samples.len(),
        "converged": count(SampleStatus::Converged),
        "no_solution": count(SampleStatus::NoSolution),
        "failed": failed,
        "samples": samples,
    });
    Ok((result, samples))
}

/// Runs a solve or sweep command and writes its outputs.
pub fn run(cfg: &RunConfig) -> RunOutcome {
    let start = Instant::now();
    let mut csv_path = None;
    let (exit_code, result) = match cfg.command {
        CommandName::Sweep => match sweep_command(cfg) {
            Ok((result, samples)) => {
                let failed = result["failed"].as_u64().unwrap_or(0) > 0;
                let mut code = if failed { EXIT_NO_CONVERGENCE } else { EXIT_OK };
                if let Some(p) = &cfg.args.csv {
                    match write_sweep_csv(p, cfg, &samples) {
                        Ok(()) => csv_path = Some(p.clone()),
                        Err(e) => {
                            eprintln!("kbeam: cannot write {}: {e}", p.display());
                            code = EXIT_INVALID;
                        }
                    }
                }
                (code, result)
            }
            Err(e) => (exit_code_for(&e), error_result(&e)),
        },
        CommandName::Verify => (EXIT_INVALID, json!({"status": "invalid_config"})),
        _ => match solve_command(cfg) {
            Ok(s) => {
                let mut code = EXIT_OK;
                if let Some(p) = &cfg.args.csv {
                    match write_solution_csv(p, cfg, &s.u, &s.w) {
                        Ok(()) => csv_path = Some(p.clone()),
                        Err(e) => {
                            eprintln!("kbeam: cannot write {}: {e}", p.display());
                            code = EXIT_INVALID;
                        }
                    }
                }
                (code, s.result)
            }
            Err(e) => (exit_code_for(&e), error_result(&e)),
        },
    };
    RunOutcome {
        exit_code,
        report: RunReport {
            config: cfg.clone(),
            result,
            solution_csv_path: csv_path,
            timing_ms: start.elapsed().as_secs_f64() * 1e3,
        },
    }
}

fn emit(out: Option<&Path>, text: &str) -> std::io::Result<()> {
    match out {
        Some(p) => fs::write(p, format!("{text}\n")),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

/// Entry point used by the binary; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let (command, args) = match cli.command {
        Command::SolveLinear(a) => (CommandName::SolveLinear, a),
        Command::SolveNonlocal(a) => (CommandName::SolveNonlocal, a),
        Command::SolveEigen(a) => (CommandName::SolveEigen, a),
        Command::SolveSublinear(a) => (CommandName::SolveSublinear, a),
        Command::Sweep(a) => (CommandName::Sweep, a),
        Command::Verify(v) => {
            return match verify_report(&v.report) {
                Ok(rep) => {
                    let text = serde_json::to_string_pretty(&rep).expect("serializable");
                    if let Err(e) = emit(v.out.as_deref(), &text) {
                        eprintln!("kbeam: {e}");
                        return EXIT_INVALID;
                    }
                    if rep.passed {
                        EXIT_OK
                    } else {
                        EXIT_VERIFY_FAILED
                    }
                }
                Err(e) => {
                    eprintln!("kbeam: {e}");
                    EXIT_INVALID
                }
            };
        }
    };
    let cfg = RunConfig { command, args };
    let outcome = run(&cfg);
    let text = serde_json::to_string_pretty(&outcome.report).expect("serializable");
    if let Err(e) = emit(cfg.args.out.as_deref(), &text) {
        eprintln!("kbeam: {e}");
        return EXIT_INVALID;
    }
    if let Some(reason) = outcome.report.result.get("reason").and_then(Value::as_str) {
        eprintln!("kbeam: {reason}");
    }
    outcome.exit_code
}

//! Independent re-check of a written solution.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

use crate::linear_core::{energy, residual, ProblemParams};
use crate::numerics::{integrate_product, second_difference, Grid, GridFunction};

use super::csv_io::read_solution_csv;
use super::{CommandName, RunReport};

const RESIDUAL_REL: f64 = 5e-2;
const IDENTITY_REL: f64 = 1e-8;
const CURVATURE_REL: f64 = 1e-3;
const BOUNDARY_TOL: f64 = 1e-14;
const SIGN_TOL: f64 = 1e-14;

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub measured: f64,
    pub threshold: f64,
    /// `threshold - measured`; negative when the check fails.
    pub slack: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CheckResult {
    fn new(name: &'static str, measured: f64, threshold: f64) -> Self {
        CheckResult {
            name,
            passed: measured <= threshold,
            measured,
            threshold,
            slack: threshold - measured,
            note: None,
        }
    }

    fn skipped(name: &'static str, why: &str) -> Self {
        CheckResult {
            name,
            passed: true,
            measured: 0.0,
            threshold: 0.0,
            slack: 0.0,
            note: Some(format!("skipped: {why}")),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub report: PathBuf,
    pub solution: PathBuf,
    pub command: CommandName,
    pub passed: bool,
    pub checks: Vec<CheckResult>,
}

fn resolve_csv(report_path: &Path, csv: &Path) -> PathBuf {
    if csv.is_absolute() || csv.exists() {
        return csv.to_path_buf();
    }
    report_path
        .parent()
        .map(|d| d.join(csv))
        .filter(|p| p.exists())
        .unwrap_or_else(|| csv.to_path_buf())
}

fn number(result: &Value, key: &str) -> Result<f64, String> {
    result
        .get(key)
        .and_then(Value::as_f64)
        .ok_or_else(|| format!("report result has no numeric {key:?}"))
}

/// Reloads a report and its solution CSV and re-checks the solution against
/// the equation it claims to solve. `Err` means the inputs are unusable.
pub fn verify_report(path: &Path) -> Result<VerifyReport, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let report: RunReport =
        serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    let cfg = &report.config;
    let command = cfg.command;
    if matches!(command, CommandName::Sweep | CommandName::Verify) {
        return Err(format!("cannot verify a {command:?} report"));
    }
    let status = report.result.get("status").and_then(Value::as_str);
    if status != Some("converged") {
        return Err(format!("report status is {status:?}, nothing to verify"));
    }
    let csv = report
        .solution_csv_path
        .as_deref()
        .ok_or("report has no solution_csv_path")?;
    let csv = resolve_csv(path, csv);
    let table = read_solution_csv(&csv)?;

    let params = cfg.params().map_err(|e| e.to_string())?;
    let grid = Grid::new(table.x.len()).map_err(|e| e.to_string())?;
    if grid.len() != cfg.args.n {
        return Err(format!(
            "solution has {} rows but the config asks for n = {}",
            grid.len(),
            cfg.args.n
        ));
    }
    let u = GridFunction::new(grid, table.u).map_err(|e| e.to_string())?;
    let w = GridFunction::new(grid, table.w).map_err(|e| e.to_string())?;
    if !(u.is_finite() && w.is_finite()) {
        return Err("solution contains non-finite values".into());
    }
    let r = number(&report.result, "R")?;

    let g = match command {
        CommandName::SolveLinear | CommandName::SolveNonlocal => cfg.args.g.sample(grid),
        CommandName::SolveEigen => &u * params.lambda,
        CommandName::SolveSublinear => {
            let spec = cfg.nonlinearity().map_err(|e| e.to_string())?;
            u.map(|s| params.lambda * spec.eval(s))
        }
        CommandName::Sweep | CommandName::Verify => unreachable!(),
    };
    let g_sup = g.sup_norm();

    let mut checks = Vec::new();

    let node_err = table
        .x
        .iter()
        .enumerate()
        .map(|(i, &x)| (x - grid.node(i)).abs())
        .fold(0.0, f64::max);
    checks.push(CheckResult::new("grid_nodes", node_err, 1e-15));

    let n = grid.len();
    let edge = [u.values()[0], u.values()[n - 1], w.values()[0], w.values()[n - 1]]
        .iter()
        .map(|v| v.abs())
        .fold(0.0, f64::max);
    checks.push(CheckResult::new("boundary_values", edge, BOUNDARY_TOL));

    checks.push(CheckResult::new(
        "equation_residual",
        residual(&u, &g, &params, r),
        RESIDUAL_REL * (1.0 + g_sup),
    ));

    let d2 = second_difference(&u);
    let curvature = (1..n - 1)
        .map(|i| (w.values()[i] + d2.values()[i]).abs())
        .fold(0.0, f64::max);
    checks.push(CheckResult::new(
        "curvature_consistency",
        curvature,
        CURVATURE_REL * (1.0 + g_sup),
    ));

    let e = energy(&u, &w);
    let y = y_of_r_from(&u, &w, &g, &params, r)?;
    // λ f(u) behaves like a fractional power of x at the ends, which caps
    // the quadrature order near h^{2+α}; smooth loads get the tight bound.
    let identity_rel = match command {
        CommandName::SolveSublinear => grid.spacing().powi(2),
        _ => IDENTITY_REL,
    };
    checks.push(CheckResult::new(
        "energy_identity",
        (e - y).abs(),
        identity_rel * (1.0 + g_sup * g_sup),
    ));

    let (gmin, gmax) = g
        .values()
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let lowest = |f: &GridFunction| f.values().iter().copied().fold(f64::INFINITY, f64::min);
    checks.push(if gmin >= 0.0 {
        CheckResult::new("sign_structure", 0.0 - lowest(&u).min(lowest(&w)), SIGN_TOL)
    } else if gmax <= 0.0 {
        let neg = -&u;
        let negw = -&w;
        CheckResult::new("sign_structure", 0.0 - lowest(&neg).min(lowest(&negw)), SIGN_TOL)
    } else {
        CheckResult::skipped("sign_structure", "g changes sign")
    });

    checks.push(match command {
        CommandName::SolveLinear => CheckResult::skipped("fixed_point", "R is an input"),
        CommandName::SolveEigen => CheckResult::new("fixed_point", (r - e).abs(), 1e-8),
        _ => CheckResult::new(
            "fixed_point",
            (r - e).abs(),
            cfg.tol_r() + IDENTITY_REL * (1.0 + r.abs()),
        ),
    });

    let claimed = number(&report.result, "sup_norm")?;
    checks.push(CheckResult::new(
        "reported_sup_norm",
        (claimed - u.sup_norm()).abs(),
        1e-12 * (1.0 + claimed.abs()),
    ));

    Ok(VerifyReport {
        report: path.to_path_buf(),
        solution: csv,
        command,
        passed: checks.iter().all(|c| c.passed),
        checks,
    })
}

/// `y(R)` recomputed from the stored `w` rather than a fresh solve, so a
/// corrupted file cannot be repaired by the check itself.
fn y_of_r_from(
    u: &GridFunction,
    w: &GridFunction,
    g: &GridFunction,
    params: &ProblemParams,
    r: f64,
) -> Result<f64, String> {
    let m = params.stiffness(r).map_err(|e| e.to_string())?.value();
    Ok((integrate_product(g, u) - integrate_product(w, w)) / m)
}

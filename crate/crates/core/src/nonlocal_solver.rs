//! Solution operator `g ↦ u` of the nonlocal problem
//! `u'''' - (a + b∫(u')²) u'' = g`.
//!
//! For fixed `R` the problem is linear (see [`crate::linear_core`]); the
//! nonlocal coefficient is recovered from the scalar equation `R = y(R)`.
//! `y` is continuous and bounded with `y(0) ≥ 0`, so `φ(R) = R - y(R)` has a
//! sign change on `[0, R_max]` once `R_max` exceeds the bound.

use serde::{Deserialize, Serialize};

use crate::bisect::{bisect, grow_upper, log_probe};
use crate::error::{Error, Result};
use crate::linear_core::{residual, solve_fixed_r, y_from_solution, ProblemParams};
use crate::numerics::GridFunction;

pub const DEFAULT_TOL_R: f64 = 1e-10;
pub const DEFAULT_RESIDUAL_REL: f64 = 5e-2;
const PROBE_MAX_STEPS: usize = 10_000;

/// Sign class of a right-hand side.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConeFlag {
    Nonneg,
    Nonpos,
    Mixed,
}

impl ConeFlag {
    pub fn of(g: &GridFunction) -> Self {
        let v = g.values();
        if v.iter().all(|&x| x >= 0.0) {
            ConeFlag::Nonneg
        } else if v.iter().all(|&x| x <= 0.0) {
            ConeFlag::Nonpos
        } else {
            ConeFlag::Mixed
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct NonlocalOptions {
    pub tol_r: f64,
    /// Residual threshold relative to `1 + ‖g‖∞`; `f64::INFINITY` disables
    /// the check.
    pub residual_rel: f64,
}

impl Default for NonlocalOptions {
    fn default() -> Self {
        NonlocalOptions {
            tol_r: DEFAULT_TOL_R,
            residual_rel: DEFAULT_RESIDUAL_REL,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SolveReport {
    pub u: GridFunction,
    pub w: GridFunction,
    /// Converged `∫(u')²`.
    pub r: f64,
    /// `y(R)` at the returned `R`.
    pub y: f64,
    /// Energy `∫ u w` of the returned solution.
    pub energy: f64,
    pub iterations: usize,
    pub bracket: (f64, f64),
    pub residual: f64,
    pub cone_flag: ConeFlag,
    pub warning: Option<String>,
}

pub fn solve(g: &GridFunction, params: &ProblemParams, tol_r: f64) -> Result<SolveReport> {
    solve_with_options(
        g,
        params,
        &NonlocalOptions {
            tol_r,
            ..Default::default()
        },
    )
}

pub fn solve_with_options(
    g: &GridFunction,
    params: &ProblemParams,
    opts: &NonlocalOptions,
) -> Result<SolveReport> {
    params.validate()?;
    if !g.is_finite() {
        return Err(Error::NonFiniteInput("right-hand side g"));
    }
    let cone_flag = ConeFlag::of(g);
    let warning = (cone_flag == ConeFlag::Mixed).then(|| {
        "g changes sign: the smallest fixed point R = y(R) is returned; \
         uniqueness is only guaranteed for one-signed g"
            .to_string()
    });

    if g.values().iter().all(|&v| v == 0.0) {
        let z = GridFunction::zeros(g.grid());
        return Ok(SolveReport {
            u: z.clone(),
            w: z,
            r: 0.0,
            y: 0.0,
            energy: 0.0,
            iterations: 0,
            bracket: (0.0, 0.0),
            residual: 0.0,
            cone_flag,
            warning,
        });
    }

    let mut phi = |r: f64| -> Result<f64> {
        let sol = solve_fixed_r(g, params, r)?;
        Ok(r - y_from_solution(g, params, &sol))
    };

    let (mut lo, mut hi) = grow_upper(&mut phi, 0.0, 1.0)?;
    if cone_flag == ConeFlag::Mixed {
        // Several roots are possible; take the leftmost sign change.
        let pts = log_probe(hi);
        let vals = pts.iter().map(|&r| phi(r)).collect::<Result<Vec<_>>>()?;
        if let Some(k) = vals.windows(2).position(|w| w[0] <= 0.0 && w[1] > 0.0) {
            lo = pts[k];
            hi = pts[k + 1];
        }
    }
    let root = if phi(lo)? == 0.0 {
        crate::bisect::Root {
            r: lo,
            bracket: (lo, hi),
            iterations: 0,
        }
    } else {
        bisect(&mut phi, lo, hi, opts.tol_r)?
    };

    let sol = solve_fixed_r(g, params, root.r)?;
    let y = y_from_solution(g, params, &sol);
    let res = residual(&sol.u, g, params, root.r);
    if res > opts.residual_rel * (1.0 + g.sup_norm()) {
        return Err(Error::ConvergenceFailure {
            what: "finite-difference residual check",
            iterations: root.iterations,
            last: Some(Box::new(sol.u)),
        });
    }
    Ok(SolveReport {
        energy: sol.energy,
        u: sol.u,
        w: sol.w,
        r: root.r,
        y,
        iterations: root.iterations,
        bracket: root.bracket,
        residual: res,
        cone_flag,
        warning,
    })
}

/// Outcome of [`verify_uniqueness_probe`].
#[derive(Clone, Debug)]
pub struct ProbeOutcome {
    /// Largest pairwise distance between the limits.
    pub spread: f64,
    pub limits: Vec<f64>,
    pub steps: Vec<usize>,
}

/// Runs `R ← R + θ (y(R) - R)` from each start and reports how far apart
/// the limits end up. θ starts at 1 and is halved whenever the defect
/// `|y(R) - R|` fails to shrink.
pub fn verify_uniqueness_probe(
    g: &GridFunction,
    params: &ProblemParams,
    starts: &[f64],
    tol_r: f64,
) -> Result<ProbeOutcome> {
    params.validate()?;
    if !g.is_finite() {
        return Err(Error::NonFiniteInput("right-hand side g"));
    }
    let y = |r: f64| -> Result<f64> {
        let sol = solve_fixed_r(g, params, r)?;
        Ok(y_from_solution(g, params, &sol))
    };

    let mut limits = Vec::with_capacity(starts.len());
    let mut steps = Vec::with_capacity(starts.len());
    for &start in starts {
        if !(start.is_finite() && start >= 0.0) {
            return Err(Error::Domain {
                what: "probe start",
                value: start,
            });
        }
        let mut r = start;
        let mut theta = 1.0;
        let mut defect = y(r)? - r;
        let mut k = 0;
        while defect.abs() > tol_r {
            if k == PROBE_MAX_STEPS {
                return Err(Error::ProbeFailure(format!(
                    "fixed-point iteration from R = {start} did not settle in {PROBE_MAX_STEPS} steps"
                )));
            }
            let next = (r + theta * defect).max(0.0);
            let next_defect = y(next)? - next;
            if next_defect.abs() >= defect.abs() && theta > 1e-6 {
                theta *= 0.5;
            }
            r = next;
            defect = next_defect;
            k += 1;
        }
        limits.push(r);
        steps.push(k);
    }
    let spread = limits
        .iter()
        .flat_map(|a| limits.iter().map(move |b| (a - b).abs()))
        .fold(0.0, f64::max);
    Ok(ProbeOutcome {
        spread,
        limits,
        steps,
    })
}

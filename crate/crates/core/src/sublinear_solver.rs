//! Positive solutions for sublinear `f(u) = c₁uᵖ + c₂u^q`, `0 < p, q < 1`.
//!
//! At a frozen `R` the map `H(ω) = T_R(λ f(ω))` is increasing and
//! α-concave on the cone of nonnegative functions, so successive iteration
//! `v_{k+1} = H(v_k)` converges to its unique fixed point from any start in
//! the cone interior. The outer loop then solves `R = ∫(u_R')²` by
//! bisection.

use serde::{Deserialize, Serialize};

use crate::bisect::{bisect, grow_upper};
use crate::error::{Error, Result};
use crate::kernels::NystromPair;
use crate::linear_core::{energy, residual, ProblemParams};
use crate::numerics::{integrate_product, Grid, GridFunction};

pub const DEFAULT_TOL_R: f64 = 1e-8;
pub const DEFAULT_INNER_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_INNER: usize = 10_000;
pub const DEFAULT_RESIDUAL_REL: f64 = 5e-2;
const CONCAVITY_SAMPLES: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Nonlinearity {
    PowerSum { c1: f64, p: f64, c2: f64, q: f64 },
    Identity,
}

/// A right-hand side `f` together with the concavity exponent `α` claimed
/// for it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NonlinearitySpec {
    pub f: Nonlinearity,
    pub alpha: f64,
}

impl NonlinearitySpec {
    /// `c₁uᵖ + c₂u^q` with `α = max(p, q)`.
    pub fn power_sum(c1: f64, p: f64, c2: f64, q: f64) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidNonlinearity(msg));
        if !(c1.is_finite() && c2.is_finite() && c1 >= 0.0 && c2 >= 0.0) {
            return bad(format!("coefficients must be >= 0, got c1 = {c1}, c2 = {c2}"));
        }
        if c1 * c1 + c2 * c2 == 0.0 {
            return bad("c1 and c2 cannot both vanish".into());
        }
        for (name, e) in [("p", p), ("q", q)] {
            if !(e > 0.0 && e < 1.0) {
                return bad(format!("exponent {name} = {e} must lie in (0, 1)"));
            }
        }
        Ok(NonlinearitySpec {
            f: Nonlinearity::PowerSum { c1, p, c2, q },
            alpha: p.max(q),
        })
    }

    /// `f(s) = s`; not sublinear, kept for comparison with the eigen case.
    pub fn identity() -> Self {
        NonlinearitySpec {
            f: Nonlinearity::Identity,
            alpha: 0.5,
        }
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn eval(&self, s: f64) -> f64 {
        f_eval(self, s)
    }
}

/// `f(s⁺)`; negative arguments are clipped to zero.
pub fn f_eval(spec: &NonlinearitySpec, s: f64) -> f64 {
    let s = s.max(0.0);
    match spec.f {
        Nonlinearity::PowerSum { c1, p, c2, q } => {
            let mut v = 0.0;
            if c1 != 0.0 {
                v += c1 * s.powf(p);
            }
            if c2 != 0.0 {
                v += c2 * s.powf(q);
            }
            v
        }
        Nonlinearity::Identity => s,
    }
}

/// Checks `f(τs) ≥ τ^α f(s)` on a `samples × samples` lattice with
/// `τ ∈ (0, 1)` uniform and `s ∈ [1e-6, 1e3]` geometric, and that `f`
/// increases along the `s` lattice.
pub fn check_alpha_concavity(spec: &NonlinearitySpec, samples: usize) -> bool {
    let alpha = spec.alpha;
    if !(alpha > 0.0 && alpha < 1.0) || samples < 2 {
        return false;
    }
    let s_pts: Vec<f64> = (0..samples)
        .map(|j| 1e-6 * 1e9f64.powf(j as f64 / (samples - 1) as f64))
        .collect();
    let increasing = s_pts.windows(2).all(|w| f_eval(spec, w[1]) > f_eval(spec, w[0]));
    if !increasing {
        return false;
    }
    (1..=samples).all(|i| {
        let tau = i as f64 / (samples + 1) as f64;
        let scale = tau.powf(alpha);
        s_pts
            .iter()
            .all(|&s| f_eval(spec, tau * s) >= scale * f_eval(spec, s) - 1e-12)
    })
}

/// `H(ω) = T_R(λ f(ω⁺))` at a frozen `R`.
#[derive(Clone, Debug)]
pub struct HOperator {
    pair: NystromPair,
    lambda: f64,
    spec: NonlinearitySpec,
}

impl HOperator {
    pub fn new(params: &ProblemParams, spec: &NonlinearitySpec, r: f64, grid: Grid) -> Result<Self> {
        Ok(HOperator {
            pair: NystromPair::new(params.stiffness(r)?, grid),
            lambda: params.lambda,
            spec: *spec,
        })
    }

    pub fn grid(&self) -> Grid {
        self.pair.grid()
    }

    /// `λ f(ω⁺)` on the grid.
    pub fn load(&self, omega: &GridFunction) -> GridFunction {
        omega.map(|v| self.lambda * f_eval(&self.spec, v))
    }

    /// `(H ω, -(H ω)'')`.
    pub fn apply_pair(&self, omega: &GridFunction) -> (GridFunction, GridFunction) {
        self.pair.apply(&self.load(omega))
    }

    pub fn apply(&self, omega: &GridFunction) -> GridFunction {
        self.apply_pair(omega).0
    }
}

/// Initial iterate of the inner iteration.
#[derive(Clone, Debug, Default, PartialEq)]
pub enum InnerStart {
    /// `v₀ = H(𝟙)`.
    #[default]
    ImageOfOne,
    /// `v₀ = c·𝟙`.
    Constant(f64),
    Given(GridFunction),
}

#[derive(Clone, Debug)]
pub struct InnerOptions {
    /// Stop when `‖v_{k+1} - v_k‖∞ ≤ tol · ‖v_{k+1}‖∞`.
    pub tol: f64,
    pub max_iter: usize,
    pub start: InnerStart,
}

impl Default for InnerOptions {
    fn default() -> Self {
        InnerOptions {
            tol: DEFAULT_INNER_TOL,
            max_iter: DEFAULT_MAX_INNER,
            start: InnerStart::ImageOfOne,
        }
    }
}

#[derive(Clone, Debug)]
pub struct InnerSolution {
    pub u: GridFunction,
    pub w: GridFunction,
    pub iterations: usize,
}

pub fn inner_solve(
    params: &ProblemParams,
    spec: &NonlinearitySpec,
    r: f64,
    grid: Grid,
    opts: &InnerOptions,
) -> Result<InnerSolution> {
    params.validate()?;
    if params.lambda < 0.0 {
        return Err(no_solution_for_negative(params.lambda));
    }
    let h = HOperator::new(params, spec, r, grid)?;
    iterate(&h, opts)
}

fn iterate(h: &HOperator, opts: &InnerOptions) -> Result<InnerSolution> {
    let grid = h.grid();
    let mut v = match &opts.start {
        InnerStart::ImageOfOne => h.apply(&GridFunction::constant(grid, 1.0)),
        InnerStart::Constant(c) => GridFunction::constant(grid, *c),
        InnerStart::Given(v0) => {
            if v0.grid() != grid {
                return Err(Error::InvalidGrid("start iterate lives on another grid".into()));
            }
            v0.clone()
        }
    };
    for k in 1..=opts.max_iter {
        let (next, w) = h.apply_pair(&v);
        let step = (&next - &v).sup_norm();
        if step <= opts.tol * next.sup_norm() {
            return Ok(InnerSolution {
                u: next,
                w,
                iterations: k,
            });
        }
        v = next;
    }
    Err(Error::ConvergenceFailure {
        what: "monotone inner iteration",
        iterations: opts.max_iter,
        last: Some(Box::new(v)),
    })
}

fn no_solution_for_negative(lambda: f64) -> Error {
    Error::NoPositiveSolution(format!(
        "λ = {lambda} < 0: a positive solution would force u'' ≥ 0 and hence u ≤ 0"
    ))
}

#[derive(Clone, Debug)]
pub struct SublinearOptions {
    pub tol_r: f64,
    pub inner: InnerOptions,
    /// Initial upper end of the outer bracket; doubled until `ψ > 0`.
    pub bracket_hi: f64,
    /// Residual threshold relative to `1 + λ`; `f64::INFINITY` disables it.
    pub residual_rel: f64,
}

impl Default for SublinearOptions {
    fn default() -> Self {
        SublinearOptions {
            tol_r: DEFAULT_TOL_R,
            inner: InnerOptions::default(),
            bracket_hi: 1.0,
            residual_rel: DEFAULT_RESIDUAL_REL,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SublinearReport {
    pub u: GridFunction,
    pub w: GridFunction,
    pub r: f64,
    pub energy: f64,
    /// Inner iteration count for every outer evaluation, in order.
    pub inner_iterations: Vec<usize>,
    pub outer_iterations: usize,
    pub bracket: (f64, f64),
    pub residual: f64,
    /// `λ = 0`: the zero solution returned without iterating.
    pub trivial: bool,
}

impl SublinearReport {
    pub fn sup_norm(&self) -> f64 {
        self.u.sup_norm()
    }
}

pub fn solve(params: &ProblemParams, spec: &NonlinearitySpec, grid: Grid) -> Result<SublinearReport> {
    solve_with_options(params, spec, grid, &SublinearOptions::default())
}

pub fn solve_with_options(
    params: &ProblemParams,
    spec: &NonlinearitySpec,
    grid: Grid,
    opts: &SublinearOptions,
) -> Result<SublinearReport> {
    params.validate()?;
    if !check_alpha_concavity(spec, CONCAVITY_SAMPLES) {
        return Err(Error::InvalidNonlinearity(format!(
            "{:?} fails f(τs) ≥ τ^α f(s) or monotonicity with α = {}",
            spec.f, spec.alpha
        )));
    }
    if params.lambda < 0.0 {
        return Err(no_solution_for_negative(params.lambda));
    }
    if params.lambda == 0.0 {
        let z = GridFunction::zeros(grid);
        return Ok(SublinearReport {
            u: z.clone(),
            w: z,
            r: 0.0,
            energy: 0.0,
            inner_iterations: Vec::new(),
            outer_iterations: 0,
            bracket: (0.0, 0.0),
            residual: 0.0,
            trivial: true,
        });
    }

    let mut inner_counts = Vec::new();
    let mut psi = |r: f64| -> Result<f64> {
        let s = inner_solve(params, spec, r, grid, &opts.inner)?;
        inner_counts.push(s.iterations);
        Ok(r - energy(&s.u, &s.w))
    };
    let (lo, hi) = grow_upper(&mut psi, 0.0, opts.bracket_hi)?;
    let root = bisect(&mut psi, lo, hi, opts.tol_r)?;

    let s = inner_solve(params, spec, root.r, grid, &opts.inner)?;
    inner_counts.push(s.iterations);
    let g = s.u.map(|v| params.lambda * f_eval(spec, v));
    let res = residual(&s.u, &g, params, root.r);
    if res > opts.residual_rel * (1.0 + params.lambda) {
        return Err(Error::ConvergenceFailure {
            what: "finite-difference residual check",
            iterations: root.iterations,
            last: Some(Box::new(s.u)),
        });
    }
    Ok(SublinearReport {
        energy: energy(&s.u, &s.w),
        u: s.u,
        w: s.w,
        r: root.r,
        inner_iterations: inner_counts,
        outer_iterations: root.iterations,
        bracket: root.bracket,
        residual: res,
        trivial: false,
    })
}

/// Outer loop by damped direct iteration `R ← R + θ (energy(u_R) - R)`
/// instead of bisection; used to probe uniqueness of the outer fixed point.
pub fn solve_by_damped_iteration(
    params: &ProblemParams,
    spec: &NonlinearitySpec,
    grid: Grid,
    r0: f64,
    opts: &SublinearOptions,
) -> Result<(f64, GridFunction)> {
    params.validate()?;
    if params.lambda < 0.0 {
        return Err(no_solution_for_negative(params.lambda));
    }
    let eval = |r: f64| -> Result<(f64, GridFunction)> {
        let s = inner_solve(params, spec, r, grid, &opts.inner)?;
        Ok((energy(&s.u, &s.w) - r, s.u))
    };
    let mut r = r0.max(0.0);
    let mut theta = 1.0;
    let (mut defect, mut u) = eval(r)?;
    for _ in 0..DEFAULT_MAX_INNER {
        if defect.abs() <= opts.tol_r {
            return Ok((r, u));
        }
        let next = (r + theta * defect).max(0.0);
        let (d, v) = eval(next)?;
        if d.abs() >= defect.abs() && theta > 1e-6 {
            theta *= 0.5;
        }
        r = next;
        defect = d;
        u = v;
    }
    Err(Error::ConvergenceFailure {
        what: "damped outer iteration",
        iterations: DEFAULT_MAX_INNER,
        last: Some(Box::new(u)),
    })
}

/// Right side of the a-priori estimate `∫(u')² ≤ λ ∫ f(u) u / a`.
pub fn energy_bound(params: &ProblemParams, spec: &NonlinearitySpec, u: &GridFunction) -> f64 {
    let fu = u.map(|v| f_eval(spec, v));
    params.lambda * integrate_product(&fu, u) / params.a
}

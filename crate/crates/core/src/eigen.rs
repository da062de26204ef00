//! The linear case `f(u) = u`.
//!
//! With hinged ends, `u'''' - A u'' = λ u` has nontrivial solutions exactly
//! when `λ = (kπ)⁴ + A (kπ)²`, with eigenfunction `sin kπx`. A positive
//! solution of the nonlocal problem is therefore `c sin πx` with
//! `∫(u')² = c²π²/2 = t₀` and `π⁴ + (a + b t₀) π² = λ`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linear_core::{energy, ProblemParams};
use crate::nonlocal_solver;
use crate::numerics::{Grid, GridFunction};

/// Closed-form positive solution of the nonlocal eigenproblem.
#[derive(Clone, Debug, Serialize)]
pub struct EigenSolution {
    pub lambda: f64,
    pub a: f64,
    pub b: f64,
    /// `t₀ = ∫(u')²`, the unique value with `λ_{1, a + b t₀} = λ`.
    pub t0: f64,
    /// Amplitude of `u = c sin πx`.
    pub c: f64,
    pub k: u32,
    #[serde(skip)]
    pub u: GridFunction,
}

impl EigenSolution {
    pub fn params(&self) -> ProblemParams {
        ProblemParams {
            a: self.a,
            b: self.b,
            lambda: self.lambda,
        }
    }

    /// `w = -u'' = c π² sin πx`, sampled exactly.
    pub fn w(&self) -> GridFunction {
        &self.u * (PI * PI)
    }
}

/// `λ_{1,A} = (1 + A/π²) π⁴`.
pub fn principal_eigenvalue(a: f64) -> Result<f64> {
    eigenpair_lambda(1, a)
}

/// `λ = (kπ)⁴ + A (kπ)²`.
pub fn eigenpair_lambda(k: u32, a: f64) -> Result<f64> {
    if k == 0 {
        return Err(Error::Domain {
            what: "mode index k",
            value: 0.0,
        });
    }
    if !(a.is_finite() && a >= 0.0) {
        return Err(Error::Domain {
            what: "A",
            value: a,
        });
    }
    let kp2 = (k as f64 * PI).powi(2);
    Ok(kp2 * kp2 + a * kp2)
}

/// `c(λ) = √(2 (λ - λ_{1,a}) / (b π²)) / π`.
pub fn amplitude(params: &ProblemParams) -> Result<f64> {
    let t0 = threshold_energy(params)?;
    Ok((2.0 * t0).sqrt() / PI)
}

fn threshold_energy(params: &ProblemParams) -> Result<f64> {
    params.validate()?;
    if params.b == 0.0 {
        return Err(Error::ParameterDegenerate(
            "b = 0 makes the problem linear: solutions exist only at λ = λ_{1,a}, \
             with arbitrary amplitude"
                .into(),
        ));
    }
    let l1 = principal_eigenvalue(params.a)?;
    if params.lambda <= l1 {
        return Err(Error::NoPositiveSolution(format!(
            "λ = {} does not exceed the principal eigenvalue λ_1,a = {l1}",
            params.lambda
        )));
    }
    Ok((params.lambda - l1) / (params.b * PI * PI))
}

pub fn solve_nonlinear_eigen(params: &ProblemParams, grid: Grid) -> Result<EigenSolution> {
    let t0 = threshold_energy(params)?;
    let c = (2.0 * t0).sqrt() / PI;
    Ok(EigenSolution {
        lambda: params.lambda,
        a: params.a,
        b: params.b,
        t0,
        c,
        k: 1,
        u: GridFunction::from_fn(grid, |x| c * (PI * x).sin()),
    })
}

/// Energy of the sampled solution through `∫ u w`.
pub fn sampled_energy(sol: &EigenSolution) -> f64 {
    energy(&sol.u, &sol.w())
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct CrossCheck {
    pub distance: f64,
    pub tol: f64,
    pub passed: bool,
}

/// Feeds `g = λ u` to the general nonlocal solver and measures how far its
/// answer lies from the closed form.
pub fn cross_validate(sol: &EigenSolution, tol: f64) -> Result<CrossCheck> {
    let params = sol.params();
    threshold_energy(&params)?;
    let g = &sol.u * sol.lambda;
    let rep = nonlocal_solver::solve(&g, &params, 1e-13)?;
    let distance = (&rep.u - &sol.u).sup_norm();
    Ok(CrossCheck {
        distance,
        tol,
        passed: distance <= tol,
    })
}

//! The beam problem at a frozen nonlocal coefficient:
//! `u'''' - (a + bR) u'' = g` with hinged ends, and the scalar map
//! `y(R)` whose fixed points solve the nonlocal problem.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{NystromPair, Stiffness};
use crate::numerics::{integrate_product, second_difference, Grid, GridFunction};

/// The constants `a > 0`, `b ≥ 0` and the load parameter `λ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProblemParams {
    pub a: f64,
    pub b: f64,
    pub lambda: f64,
}

impl ProblemParams {
    pub fn new(a: f64, b: f64, lambda: f64) -> Result<Self> {
        let p = ProblemParams { a, b, lambda };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a.is_finite() && self.a > 0.0) {
            return Err(Error::InvalidParams(format!("a = {} must be > 0", self.a)));
        }
        if !(self.b.is_finite() && self.b >= 0.0) {
            return Err(Error::InvalidParams(format!("b = {} must be >= 0", self.b)));
        }
        if !self.lambda.is_finite() {
            return Err(Error::InvalidParams(format!(
                "lambda = {} must be finite",
                self.lambda
            )));
        }
        Ok(())
    }

    /// `m = a + bR`.
    pub fn stiffness(&self, r: f64) -> Result<Stiffness> {
        if !(r.is_finite() && r >= 0.0) {
            return Err(Error::Domain {
                what: "R",
                value: r,
            });
        }
        Stiffness::new(self.a + self.b * r)
    }
}

/// Solution of the frozen-coefficient problem.
#[derive(Clone, Debug)]
pub struct FixedRSolution {
    pub u: GridFunction,
    /// `w = -u''`.
    pub w: GridFunction,
    pub r_in: f64,
    /// `∫(u')²`, evaluated as `∫ u w`.
    pub energy: f64,
}

/// `∫₀¹ (u')² dx` through integration by parts, `∫ u w` with `w = -u''`.
pub fn energy(u: &GridFunction, w: &GridFunction) -> f64 {
    integrate_product(u, w)
}

fn check_finite(g: &GridFunction) -> Result<()> {
    if g.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFiniteInput("right-hand side g"))
    }
}

pub fn solve_fixed_r(g: &GridFunction, params: &ProblemParams, r: f64) -> Result<FixedRSolution> {
    check_finite(g)?;
    let pair = NystromPair::new(params.stiffness(r)?, g.grid());
    Ok(solve_with(&pair, g, r))
}

pub(crate) fn solve_with(pair: &NystromPair, g: &GridFunction, r: f64) -> FixedRSolution {
    let (u, w) = pair.apply(g);
    let energy = energy(&u, &w);
    FixedRSolution {
        u,
        w,
        r_in: r,
        energy,
    }
}

/// `y(R) = [∫ g u_R - ∫ w_R²] / (a + bR)`.
pub fn y_of_r(g: &GridFunction, params: &ProblemParams, r: f64) -> Result<f64> {
    let sol = solve_fixed_r(g, params, r)?;
    Ok(y_from_solution(g, params, &sol))
}

pub(crate) fn y_from_solution(g: &GridFunction, params: &ProblemParams, sol: &FixedRSolution) -> f64 {
    (integrate_product(g, &sol.u) - integrate_product(&sol.w, &sol.w))
        / (params.a + params.b * sol.r_in)
}

/// Sup-norm of `D²D²u - (a+bR) D²u - g` over the interior, skipping the two
/// nodes next to each boundary.
pub fn residual(u: &GridFunction, g: &GridFunction, params: &ProblemParams, r: f64) -> f64 {
    let d2 = second_difference(u);
    let d4 = second_difference(&d2);
    let m = params.a + params.b * r;
    let n = u.grid().len();
    (3..n - 3)
        .map(|i| (d4.values()[i] - m * d2.values()[i] - g.values()[i]).abs())
        .fold(0.0, f64::max)
}

/// Kernel-derived a-priori constants `(C1, C2)` with
/// `‖u_R‖∞ ≤ C1 ‖g‖∞` and `‖w_R‖∞ ≤ C2 ‖g‖∞` for every `R ≥ 0`.
///
/// The discrete kernels are entrywise nonnegative and decrease in the
/// stiffness, so their row sums at `m = a` bound every `R`.
pub fn apriori_constants(params: &ProblemParams, grid: Grid) -> Result<(f64, f64)> {
    let pair = NystromPair::new(params.stiffness(0.0)?, grid);
    let ones = GridFunction::constant(grid, 1.0);
    let (u, w) = pair.apply(&ones);
    Ok((u.sup_norm(), w.sup_norm()))
}

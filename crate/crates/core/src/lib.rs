//! Solvers for the hinged Kirchhoff beam
//!
//! ```text
//! u'''' - (a + b ∫₀¹ (u')² dx) u'' = λ f(u),   u(0) = u(1) = u''(0) = u''(1) = 0
//! ```
//!
//! built on the Green's-function representation of the frozen-coefficient
//! problem. The nonlocal coefficient is resolved by a scalar fixed point in
//! `R = ∫(u')²`; for `f(u) = u` the positive branch is available in closed
//! form, and for sublinear power-sum nonlinearities a monotone iteration
//! solves the inner problem at each `R`.

pub mod cli;
pub mod continuation;
pub mod eigen;
pub mod error;
pub mod exec;
pub mod kernels;
pub mod linear_core;
pub mod nonlocal_solver;
pub mod numerics;
pub mod sublinear_solver;

mod bisect;

pub use error::{Error, Result};
pub use exec::Exec;
pub use linear_core::ProblemParams;
pub use numerics::{Grid, GridFunction};

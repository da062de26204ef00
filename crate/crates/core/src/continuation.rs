//! Positive-solution branches tabulated over a λ grid.
//!
//! Both branches are single-valued in λ, so every sample is an independent
//! solve and the sweep parallelizes over samples.

use serde::{Deserialize, Serialize};

use crate::eigen::solve_nonlinear_eigen;
use crate::error::Error;
use crate::exec::Exec;
use crate::linear_core::ProblemParams;
use crate::numerics::Grid;
use crate::sublinear_solver::{self, NonlinearitySpec, SublinearOptions};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleStatus {
    Converged,
    NoSolution,
    Failed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchSample {
    pub lambda: f64,
    pub sup_norm: f64,
    #[serde(rename = "R")]
    pub r: f64,
    pub iterations: usize,
    pub status: SampleStatus,
}

impl BranchSample {
    fn from_error(lambda: f64, e: &Error) -> Self {
        BranchSample {
            lambda,
            sup_norm: f64::NAN,
            r: f64::NAN,
            iterations: 0,
            status: if matches!(e, Error::NoPositiveSolution(_)) {
                SampleStatus::NoSolution
            } else {
                SampleStatus::Failed
            },
        }
    }
}

pub fn sweep_eigen(a: f64, b: f64, lambdas: &[f64], grid: Grid) -> Vec<BranchSample> {
    sweep_eigen_with(a, b, lambdas, grid, Exec::default())
}

pub fn sweep_eigen_with(a: f64, b: f64, lambdas: &[f64], grid: Grid, exec: Exec) -> Vec<BranchSample> {
    exec.map(lambdas, |&lambda| {
        let sol = ProblemParams::new(a, b, lambda).and_then(|p| solve_nonlinear_eigen(&p, grid));
        match sol {
            Ok(s) => BranchSample {
                lambda,
                sup_norm: s.u.sup_norm(),
                r: s.t0,
                iterations: 0,
                status: SampleStatus::Converged,
            },
            Err(e) => BranchSample::from_error(lambda, &e),
        }
    })
}

pub fn sweep_sublinear(
    a: f64,
    b: f64,
    spec: &NonlinearitySpec,
    lambdas: &[f64],
    grid: Grid,
) -> Vec<BranchSample> {
    sweep_sublinear_with(a, b, spec, lambdas, grid, &SublinearOptions::default(), Exec::default())
}

pub fn sweep_sublinear_with(
    a: f64,
    b: f64,
    spec: &NonlinearitySpec,
    lambdas: &[f64],
    grid: Grid,
    opts: &SublinearOptions,
    exec: Exec,
) -> Vec<BranchSample> {
    exec.map(lambdas, |&lambda| {
        let rep = ProblemParams::new(a, b, lambda)
            .and_then(|p| sublinear_solver::solve_with_options(&p, spec, grid, opts));
        match rep {
            Ok(r) => BranchSample {
                lambda,
                sup_norm: r.sup_norm(),
                r: r.r,
                iterations: r.outer_iterations,
                status: SampleStatus::Converged,
            },
            Err(e) => BranchSample::from_error(lambda, &e),
        }
    })
}

/// `n` points from `lo` to `hi`, geometric.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64))
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigen::principal_eigenvalue;
    use std::f64::consts::PI;

    fn grid() -> Grid {
        Grid::new(129).unwrap()
    }

    fn closed_form(lambda: f64, a: f64, b: f64) -> f64 {
        (2.0 * (lambda - PI.powi(4) - a * PI * PI) / (b * PI * PI)).sqrt() / PI
    }

    #[test]
    fn eigen_sweep_statuses_and_values() {
        let lambdas = [100.0, 110.0, 117.1483, 150.0, 194.8182];
        let out = sweep_eigen(1.0, 1.0, &lambdas, grid());
        let st: Vec<_> = out.iter().map(|s| s.status).collect();
        assert_eq!(
            st,
            [
                SampleStatus::NoSolution,
                SampleStatus::Converged,
                SampleStatus::Converged,
                SampleStatus::Converged,
                SampleStatus::Converged
            ]
        );
        for s in &out[1..] {
            assert!((s.sup_norm - closed_form(s.lambda, 1.0, 1.0)).abs() <= 1e-9);
        }
        assert!(out.windows(2).skip(1).all(|w| w[1].sup_norm > w[0].sup_norm));
        assert!((out[4].sup_norm - 1.3406557).abs() < 1e-6);
    }

    #[test]
    fn empty_grid_gives_empty_sweep() {
        assert!(sweep_eigen(1.0, 1.0, &[], grid()).is_empty());
    }

    #[test]
    fn just_above_threshold_is_small() {
        let l1 = principal_eigenvalue(1.0).unwrap();
        let out = sweep_eigen(1.0, 1.0, &[l1 + 1e-6], grid());
        assert_eq!(out[0].status, SampleStatus::Converged);
        assert!(out[0].sup_norm <= 1e-3);
    }

    #[test]
    fn eigen_lipschitz_between_neighbors() {
        // c(λ) = κ √(λ - λ₁), so |c(λ+Δ) - c(λ)| ≤ κ Δ / (2√(λ - λ₁)).
        let l1 = principal_eigenvalue(1.0).unwrap();
        let kappa = (2.0 / PI.powi(2)).sqrt() / PI;
        let lambdas: Vec<f64> = (1..40).map(|i| l1 + i as f64 * 0.5).collect();
        let out = sweep_eigen(1.0, 1.0, &lambdas, grid());
        for w in out.windows(2) {
            let bound = kappa * 0.5 / (2.0 * (w[0].lambda - l1).sqrt());
            assert!((w[1].sup_norm - w[0].sup_norm).abs() <= bound * (1.0 + 1e-9) + 1e-12);
        }
    }

    #[test]
    fn sublinear_sweep_trivial_and_forbidden() {
        let spec = NonlinearitySpec::power_sum(1.0, 0.5, 0.0, 0.5).unwrap();
        let out = sweep_sublinear(1.0, 1.0, &spec, &[-1.0, 0.0], grid());
        assert_eq!(out[0].status, SampleStatus::NoSolution);
        assert_eq!(out[1].status, SampleStatus::Converged);
        assert_eq!(out[1].sup_norm, 0.0);
    }

    #[test]
    fn sublinear_sweep_bifurcates_from_zero() {
        let spec = NonlinearitySpec::power_sum(1.0, 0.5, 0.0, 0.5).unwrap();
        let out = sweep_sublinear(1.0, 1.0, &spec, &[1e-3, 1e-2, 1e-1, 1.0], grid());
        assert!(out.iter().all(|s| s.status == SampleStatus::Converged));
        assert!(out.windows(2).all(|w| w[1].sup_norm > w[0].sup_norm));
        assert!(out[0].sup_norm < 0.1 * out[3].sup_norm);
    }

    #[test]
    fn serial_and_parallel_sweeps_agree() {
        let spec = NonlinearitySpec::power_sum(1.0, 0.5, 1.0, 0.3).unwrap();
        let lambdas = log_grid(0.1, 10.0, 4);
        let opts = SublinearOptions::default();
        let a = sweep_sublinear_with(1.0, 1.0, &spec, &lambdas, grid(), &opts, Exec::Serial);
        let b = sweep_sublinear_with(1.0, 1.0, &spec, &lambdas, grid(), &opts, Exec::Parallel);
        assert_eq!(a, b);
    }

    #[test]
    fn log_grid_endpoints() {
        let g = log_grid(1e-3, 1e2, 13);
        assert_eq!(g.len(), 13);
        assert!((g[0] - 1e-3).abs() < 1e-18);
        assert!((g[12] - 1e2).abs() < 1e-10);
    }
}

//! Test-only oracles, independent of the crate's quadrature and kernels.

#![allow(dead_code)]

use std::f64::consts::PI;

use kirchhoff_beam::numerics::{Grid, GridFunction};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Solves `(-v_{i-1} + (2 + s) v_i - v_{i+1}) / h² = rhs_i` on the interior
/// nodes with zero end values, `s = m h²`.
pub fn thomas(rhs: &[f64], m: f64, h: f64) -> Vec<f64> {
    let n = rhs.len();
    let diag = 2.0 + m * h * h;
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    for i in 1..n - 1 {
        let prev_c = if i == 1 { 0.0 } else { c[i - 1] };
        let prev_d = if i == 1 { 0.0 } else { d[i - 1] };
        let denom = diag + prev_c;
        c[i] = -1.0 / denom;
        d[i] = (rhs[i] * h * h + prev_d) / denom;
    }
    let mut v = vec![0.0; n];
    for i in (1..n - 1).rev() {
        v[i] = d[i] - c[i] * v[i + 1];
    }
    v
}

/// Finite-difference `(u, w)` for `u'''' - m u'' = g` with hinged ends.
pub fn fd_pair(g: &[f64], m: f64) -> (Vec<f64>, Vec<f64>) {
    let h = 1.0 / (g.len() - 1) as f64;
    let w = thomas(g, m, h);
    let u = thomas(&w, 0.0, h);
    (u, w)
}

/// `Σ ((u_{i+1} - u_i)/h)² h`, the energy consistent with the stencil.
pub fn fd_energy(u: &[f64]) -> f64 {
    let h = 1.0 / (u.len() - 1) as f64;
    u.windows(2).map(|p| (p[1] - p[0]).powi(2) / h).sum()
}

pub struct PowerSum {
    pub c1: f64,
    pub p: f64,
    pub c2: f64,
    pub q: f64,
}

impl PowerSum {
    pub fn eval(&self, s: f64) -> f64 {
        let s = s.max(0.0);
        self.c1 * s.powf(self.p) + self.c2 * s.powf(self.q)
    }
}

/// Monotone iteration `u ← λ A_R⁻¹ f(u)` on an `n`-node FD grid.
fn fd_inner(a: f64, b: f64, lambda: f64, f: &PowerSum, r: f64, n: usize) -> Vec<f64> {
    let m = a + b * r;
    let mut u = fd_pair(&vec![1.0; n], m).0;
    for _ in 0..100_000 {
        let load: Vec<f64> = u.iter().map(|&s| lambda * f.eval(s)).collect();
        let next = fd_pair(&load, m).0;
        let diff = next
            .iter()
            .zip(&u)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        let size = next.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        u = next;
        if diff <= 1e-15 * size {
            return u;
        }
    }
    panic!("oracle inner iteration did not settle");
}

/// `(R*, sup u)` of the FD discretization with `n` nodes.
pub fn fd_sublinear(a: f64, b: f64, lambda: f64, f: &PowerSum, n: usize) -> (f64, f64) {
    let sup = |u: &[f64]| u.iter().fold(0.0f64, |acc, v| acc.max(*v));
    if b == 0.0 {
        let u = fd_inner(a, b, lambda, f, 0.0, n);
        return (fd_energy(&u), sup(&u));
    }
    let psi = |r: f64| r - fd_energy(&fd_inner(a, b, lambda, f, r, n));
    let mut hi = 1.0;
    while psi(hi) <= 0.0 {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if psi(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let r = 0.5 * (lo + hi);
    (r, sup(&fd_inner(a, b, lambda, f, r, n)))
}

/// Second-order Richardson extrapolation from grids with `h` and `h/2`.
pub fn richardson(coarse: f64, fine: f64) -> f64 {
    (4.0 * fine - coarse) / 3.0
}

/// For `g = sin πx` the solution is `A sin πx` with `A = 1/(π⁴ + (a + bR)π²)`
/// and `R = A²π²/2`; bisects that scalar equation.
pub fn sine_fixed_point(a: f64, b: f64) -> (f64, f64) {
    let amp = |r: f64| 1.0 / (PI.powi(4) + (a + b * r) * PI * PI);
    let phi = |r: f64| r - amp(r).powi(2) * PI * PI / 2.0;
    let (mut lo, mut hi) = (0.0, 1.0);
    assert!(phi(lo) < 0.0 && phi(hi) > 0.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if phi(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let r = 0.5 * (lo + hi);
    (r, amp(r))
}

/// Random trigonometric polynomial of degree ≤ 5, shifted so its minimum
/// on the grid is `floor` (≥ 0 gives a nonnegative load).
pub fn random_trig_load(rng: &mut ChaCha8Rng, grid: Grid, floor: f64) -> GridFunction {
    let degree = rng.gen_range(1..=5);
    let coeffs: Vec<(f64, f64)> = (0..=degree)
        .map(|_| (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)))
        .collect();
    let raw = GridFunction::from_fn(grid, |x| {
        coeffs
            .iter()
            .enumerate()
            .map(|(k, (c, s))| {
                let t = 2.0 * PI * k as f64 * x;
                c * t.cos() + s * t.sin()
            })
            .sum()
    });
    let min = raw.values().iter().copied().fold(f64::INFINITY, f64::min);
    raw.map(|v| v - min + floor)
}

/// Observed order from errors on successive halvings of `h`.
pub fn observed_orders(values: &[f64]) -> Vec<f64> {
    let diffs: Vec<f64> = values.windows(2).map(|p| (p[1] - p[0]).abs()).collect();
    diffs.windows(2).map(|d| (d[0] / d[1]).log2()).collect()
}

/// `(R*, u(½))` of the FD discretization of the nonlocal problem with load
/// `g` on `n` nodes, by bisection on `R - energy(u_R)`.
pub fn fd_nonlocal(a: f64, b: f64, g: impl Fn(f64) -> f64, n: usize) -> (f64, f64) {
    let h = 1.0 / (n - 1) as f64;
    let load: Vec<f64> = (0..n).map(|i| g(i as f64 * h)).collect();
    let solve = |r: f64| fd_pair(&load, a + b * r).0;
    let psi = |r: f64| r - fd_energy(&solve(r));
    let mut hi = 1.0;
    while psi(hi) <= 0.0 {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if psi(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let r = 0.5 * (lo + hi);
    (r, solve(r)[n / 2])
}

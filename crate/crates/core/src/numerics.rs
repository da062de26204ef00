//! Uniform grid on [0, 1], composite Simpson quadrature and the second
//! difference stencil used for residual checks.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest admissible node count.
pub const MIN_NODES: usize = 33;

/// Default node count for solves.
pub const DEFAULT_NODES: usize = 257;

/// Uniform grid `x_i = i h`, `h = 1/(n-1)`, with an odd node count.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct Grid {
    n: usize,
}

impl Grid {
    pub fn new(n: usize) -> Result<Self> {
        if n.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!(
                "node count {n} is even; Simpson needs an even number of intervals"
            )));
        }
        if n < MIN_NODES {
            return Err(Error::InvalidGrid(format!(
                "node count {n} is below the minimum {MIN_NODES}"
            )));
        }
        Ok(Grid { n })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn intervals(&self) -> usize {
        self.n - 1
    }

    #[inline]
    pub fn spacing(&self) -> f64 {
        1.0 / self.intervals() as f64
    }

    /// Node `i`; exact at both endpoints.
    #[inline]
    pub fn node(&self, i: usize) -> f64 {
        debug_assert!(i < self.n);
        i as f64 / self.intervals() as f64
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |i| self.node(i))
    }

    /// Index of x = 1/2 (always a node on an odd grid).
    pub fn midpoint_index(&self) -> usize {
        self.intervals() / 2
    }

    /// Composite Simpson weights `h/3 [1, 4, 2, 4, ..., 4, 1]`.
    pub fn simpson_weights(&self) -> Vec<f64> {
        piece_weights(self.intervals(), self.spacing())
    }

    /// Quadrature weights for `∫₀¹ φ(t) dt` when φ is smooth on `[0, x_i]`
    /// and on `[x_i, 1]` separately but has a derivative jump at `x_i`.
    ///
    /// Each side is integrated on its own with a fourth-order rule, so the
    /// kink never sits inside a Simpson panel. All weights are positive.
    pub fn split_weights(&self, i: usize) -> Vec<f64> {
        let h = self.spacing();
        let mut w = piece_weights(i, h);
        let mut right = piece_weights(self.intervals() - i, h);
        right.reverse();
        if w.is_empty() {
            return right;
        }
        if right.is_empty() {
            return w;
        }
        *w.last_mut().unwrap() += right[0];
        w.extend_from_slice(&right[1..]);
        w
    }
}

impl TryFrom<usize> for Grid {
    type Error = Error;

    fn try_from(n: usize) -> Result<Self> {
        Grid::new(n)
    }
}

impl From<Grid> for usize {
    fn from(g: Grid) -> usize {
        g.n
    }
}

/// Positive fourth-order weights over `k` intervals of width `h`
/// (returned length `k + 1`, empty for `k = 0`).
///
/// Even `k` uses composite Simpson. Odd `k ≥ 3` closes with the 3/8 rule on
/// the last three intervals. A single interval falls back to the trapezoid.
fn piece_weights(k: usize, h: f64) -> Vec<f64> {
    if k == 0 {
        return Vec::new();
    }
    let mut w = vec![0.0; k + 1];
    if k == 1 {
        w[0] = 0.5 * h;
        w[1] = 0.5 * h;
        return w;
    }
    let simpson_end = if k.is_multiple_of(2) { k } else { k - 3 };
    let third = h / 3.0;
    for p in (0..simpson_end).step_by(2) {
        w[p] += third;
        w[p + 1] += 4.0 * third;
        w[p + 2] += third;
    }
    if simpson_end < k {
        let e = 3.0 * h / 8.0;
        let s = simpson_end;
        w[s] += e;
        w[s + 1] += 3.0 * e;
        w[s + 2] += 3.0 * e;
        w[s + 3] += e;
    }
    w
}

/// Samples of a function on a [`Grid`].
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    grid: Grid,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "{} values for a grid of {} nodes",
                values.len(),
                grid.len()
            )));
        }
        Ok(GridFunction { grid, values })
    }

    pub fn zeros(grid: Grid) -> Self {
        GridFunction {
            grid,
            values: vec![0.0; grid.len()],
        }
    }

    pub fn constant(grid: Grid, c: f64) -> Self {
        GridFunction {
            grid,
            values: vec![c; grid.len()],
        }
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> f64) -> Self {
        GridFunction {
            grid,
            values: grid.nodes().map(f).collect(),
        }
    }

    #[inline]
    pub fn grid(&self) -> Grid {
        self.grid
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> GridFunction {
        GridFunction {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Pointwise combination; both operands must live on the same grid.
    pub fn zip_with(&self, other: &GridFunction, f: impl Fn(f64, f64) -> f64) -> GridFunction {
        assert_eq!(self.grid, other.grid, "grid mismatch");
        GridFunction {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn sup_norm(&self) -> f64 {
        sup_norm(self)
    }

    pub fn integrate(&self) -> f64 {
        integrate(self)
    }
}

impl Add for &GridFunction {
    type Output = GridFunction;
    fn add(self, rhs: &GridFunction) -> GridFunction {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &GridFunction {
    type Output = GridFunction;
    fn sub(self, rhs: &GridFunction) -> GridFunction {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Mul<f64> for &GridFunction {
    type Output = GridFunction;
    fn mul(self, rhs: f64) -> GridFunction {
        self.map(|v| v * rhs)
    }
}

impl Neg for &GridFunction {
    type Output = GridFunction;
    fn neg(self) -> GridFunction {
        self.map(|v| -v)
    }
}

/// Composite Simpson approximation of `∫₀¹ f(x) dx`.
pub fn integrate(f: &GridFunction) -> f64 {
    simpson_sum(f.grid, |i| f.values[i])
}

/// `∫₀¹ f g dx` without materializing the product.
pub fn integrate_product(f: &GridFunction, g: &GridFunction) -> f64 {
    assert_eq!(f.grid, g.grid, "grid mismatch");
    simpson_sum(f.grid, |i| f.values[i] * g.values[i])
}

fn simpson_sum(grid: Grid, v: impl Fn(usize) -> f64) -> f64 {
    let n = grid.len();
    let mut odd = 0.0;
    let mut even = 0.0;
    for i in 1..n - 1 {
        if i % 2 == 1 {
            odd += v(i);
        } else {
            even += v(i);
        }
    }
    grid.spacing() / 3.0 * (v(0) + v(n - 1) + 4.0 * odd + 2.0 * even)
}

/// Central second difference at interior nodes; the endpoint values are
/// the boundary data `u''(0) = u''(1) = 0`.
pub fn second_difference(u: &GridFunction) -> GridFunction {
    let n = u.grid.len();
    let inv_h2 = 1.0 / (u.grid.spacing() * u.grid.spacing());
    let v = &u.values;
    let mut out = vec![0.0; n];
    for i in 1..n - 1 {
        out[i] = (v[i - 1] - 2.0 * v[i] + v[i + 1]) * inv_h2;
    }
    GridFunction {
        grid: u.grid,
        values: out,
    }
}

pub fn sup_norm(u: &GridFunction) -> f64 {
    u.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
}

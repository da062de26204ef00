//! Green's functions of the two second-order factors of the beam operator
//! and their Nyström discretization.
//!
//! The fourth-order operator `u'''' - m u''` with hinged ends factors into
//! `-w'' + m w = g`, `-u'' = w`, both with zero Dirichlet data. `G1` inverts
//! the second factor and `G2` (depending on the stiffness `m`) the first, so
//! `w = ∫ G2 g` and `u = ∫ G1 w`.

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::numerics::{Grid, GridFunction};

/// Effective stiffness `m = a + bR > 0` multiplying `u''`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct Stiffness(f64);

impl Stiffness {
    pub fn new(m: f64) -> Result<Self> {
        if !(m.is_finite() && m > 0.0) {
            return Err(Error::Domain {
                what: "stiffness m",
                value: m,
            });
        }
        Ok(Stiffness(m))
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }
}

fn check_unit(what: &'static str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(Error::Domain { what, value: v })
    }
}

/// Green's function of `-u'' = g`, `u(0) = u(1) = 0`.
pub fn g1(x: f64, t: f64) -> Result<f64> {
    check_unit("x", x)?;
    check_unit("t", t)?;
    Ok(g1_unchecked(x, t))
}

#[inline]
fn g1_unchecked(x: f64, t: f64) -> f64 {
    if t <= x {
        t * (1.0 - x)
    } else {
        x * (1.0 - t)
    }
}

/// Green's function of `-w'' + m w = g`, `w(0) = w(1) = 0`.
pub fn g2(t: f64, s: f64, m: f64) -> Result<f64> {
    check_unit("t", t)?;
    check_unit("s", s)?;
    let m = Stiffness::new(m)?;
    Ok(g2_unchecked(t, s, m.sqrt()))
}

impl Stiffness {
    #[inline]
    fn sqrt(self) -> f64 {
        self.0.sqrt()
    }
}

/// `sinh(k lo) sinh(k (1-hi)) / (k sinh k)` rewritten with decaying
/// exponentials only:
///
/// `e^{-k(hi-lo)} (1 - e^{-2k lo}) (1 - e^{-2k(1-hi)}) / (2k (1 - e^{-2k}))`.
///
/// `expm1` keeps the small-`k` limit (which tends to `G1`) accurate.
#[inline]
fn g2_unchecked(t: f64, s: f64, k: f64) -> f64 {
    let (lo, hi) = if t <= s { (t, s) } else { (s, t) };
    let left = -(-2.0 * k * lo).exp_m1();
    let right = -(-2.0 * k * (1.0 - hi)).exp_m1();
    let denom = 2.0 * k * -(-2.0 * k).exp_m1();
    (-k * (hi - lo)).exp() * left * right / denom
}

/// `(∂ₜG2(x, 0), ∂ₜG2(x, 1))`, that is `sinh(k(1-x)) / sinh k` and
/// `-sinh(kx) / sinh k`.
fn g2_end_slopes(x: f64, k: f64) -> (f64, f64) {
    let ratio = |y: f64| (-k * (1.0 - y)).exp() * (-2.0 * k * y).exp_m1() / (-2.0 * k).exp_m1();
    (ratio(1.0 - x), -ratio(x))
}

/// Dense quadrature-weighted kernel: `(K g)_i = Σ_j K_ij g_j ≈ ∫ G(x_i, t) g(t) dt`.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelMatrix {
    grid: Grid,
    entries: Vec<f64>,
}

impl KernelMatrix {
    /// Nyström matrix of a Green's function `G(x, t)` of `-v'' + m v = g`
    /// with zero end values.
    ///
    /// Row `i` integrates `G(x_i, ·) g` with the trapezoid rule on the two
    /// smooth pieces `[0, x_i]` and `[x_i, 1]`, plus the `h²` and `h⁴`
    /// Euler-Maclaurin end corrections. At the kink `∂ₜG` jumps by 1 and
    /// `∂ₜ³G` by `m`, and at the ends only `∂ₜG(x, 0)` and `∂ₜG(x, 1)`
    /// survive, so the corrections are closed-form. Interior weights are
    /// uniform, so the discretization error is a smooth function of `x_i`.
    ///
    /// All weights stay positive while `m h² < 54`; the rule is used for
    /// `m h² ≤ 1` and the positive split weights of
    /// [`Grid::split_weights`] beyond that.
    fn assemble(
        grid: Grid,
        exec: Exec,
        m: f64,
        kernel: impl Fn(f64, f64) -> f64 + Sync + Send,
        slopes: impl Fn(f64) -> (f64, f64) + Sync + Send,
    ) -> Self {
        let n = grid.len();
        let h = grid.spacing();
        let mut entries = vec![0.0; n * n];
        if m * h * h > 1.0 {
            exec.fill_rows(&mut entries, n, |i, row| {
                let x = grid.node(i);
                let w = grid.split_weights(i);
                for (j, out) in row.iter_mut().enumerate() {
                    *out = w[j] * kernel(x, grid.node(j));
                }
            });
            return KernelMatrix { grid, entries };
        }
        let c = h * h / 12.0;
        let d = h.powi(4) / 720.0;
        let e = h * h / 720.0;
        exec.fill_rows(&mut entries, n, |i, row| {
            if i == 0 || i == n - 1 {
                return;
            }
            let x = grid.node(i);
            for (j, out) in row.iter_mut().enumerate().take(n - 1).skip(1) {
                *out = h * kernel(x, grid.node(j));
            }
            // Kink: -c g_i + d (3 g''_i + m g_i), g'' by central differences.
            row[i] += -c + d * m - 6.0 * e;
            row[i - 1] += 3.0 * e;
            row[i + 1] += 3.0 * e;
            // Ends: f'(0) = s0 g_0 and f'''(0) = s0 (m g_0 + 3 g''(0)), with
            // g''(0) from the one-sided stencil (2, -5, 4, -1) / h².
            let (s0, s1) = slopes(x);
            for (j, k) in [(0, 2.0), (1, -5.0), (2, 4.0), (3, -1.0)] {
                row[j] -= 3.0 * e * k * s0;
                row[n - 1 - j] += 3.0 * e * k * s1;
            }
            row[0] += c * s0 - d * m * s0;
            row[n - 1] += -c * s1 + d * m * s1;
        });
        KernelMatrix { grid, entries }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    #[inline]
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.grid.len() + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.grid.len();
        &self.entries[i * n..(i + 1) * n]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn apply(&self, g: &GridFunction) -> GridFunction {
        assert_eq!(self.grid, g.grid(), "grid mismatch");
        let n = self.grid.len();
        let gv = g.values();
        let values = self
            .entries
            .chunks_exact(n)
            .map(|row| row.iter().zip(gv).map(|(k, v)| k * v).sum())
            .collect();
        GridFunction::new(self.grid, values).expect("length preserved")
    }

    /// Largest row sum; with nonnegative entries this is the ∞-operator norm.
    pub fn max_row_sum(&self) -> f64 {
        self.entries
            .chunks_exact(self.grid.len())
            .map(|r| r.iter().sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// `self ∘ rhs` as a dense product.
    pub fn compose(&self, rhs: &KernelMatrix, exec: Exec) -> KernelMatrix {
        assert_eq!(self.grid, rhs.grid, "grid mismatch");
        let n = self.grid.len();
        let mut entries = vec![0.0; n * n];
        exec.fill_rows(&mut entries, n, |i, out| {
            for (k, &a) in self.row(i).iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                for (o, &b) in out.iter_mut().zip(rhs.row(k)) {
                    *o += a * b;
                }
            }
        });
        KernelMatrix {
            grid: self.grid,
            entries,
        }
    }
}

/// The pair of maps `g ↦ w = -u''` and `g ↦ u` for one stiffness value.
///
/// `u` is applied as `G1 (K2 g)`, two O(n²) products, instead of through a
/// precomputed dense composite; [`NystromPair::composed`] builds the
/// composite when it is needed explicitly.
#[derive(Clone, Debug)]
pub struct NystromPair {
    stiffness: Stiffness,
    k2: KernelMatrix,
    g1: KernelMatrix,
}

impl NystromPair {
    pub fn new(m: Stiffness, grid: Grid) -> Self {
        Self::with_exec(m, grid, Exec::default())
    }

    pub fn with_exec(m: Stiffness, grid: Grid, exec: Exec) -> Self {
        let k = m.sqrt();
        NystromPair {
            stiffness: m,
            k2: KernelMatrix::assemble(
                grid,
                exec,
                m.value(),
                move |t, s| g2_unchecked(t, s, k),
                move |x| g2_end_slopes(x, k),
            ),
            g1: g1_matrix(grid, exec),
        }
    }

    pub fn stiffness(&self) -> Stiffness {
        self.stiffness
    }

    pub fn grid(&self) -> Grid {
        self.k2.grid
    }

    pub fn k2(&self) -> &KernelMatrix {
        &self.k2
    }

    pub fn g1(&self) -> &KernelMatrix {
        &self.g1
    }

    /// `w = K2 g`, the image of `g` under `-d²/dx²` of the solution.
    pub fn apply_w(&self, g: &GridFunction) -> GridFunction {
        self.k2.apply(g)
    }

    /// `(u, w)` for right-hand side `g`.
    pub fn apply(&self, g: &GridFunction) -> (GridFunction, GridFunction) {
        let w = self.k2.apply(g);
        let u = self.g1.apply(&w);
        (u, w)
    }

    pub fn apply_u(&self, g: &GridFunction) -> GridFunction {
        self.apply(g).0
    }

    /// Dense `K12 = G1_weighted ∘ K2`.
    pub fn composed(&self, exec: Exec) -> KernelMatrix {
        self.g1.compose(&self.k2, exec)
    }
}

/// Weighted `G1` matrix; independent of the stiffness.
pub fn g1_matrix(grid: Grid, exec: Exec) -> KernelMatrix {
    KernelMatrix::assemble(grid, exec, 0.0, g1_unchecked, |x| (1.0 - x, -x))
}

/// Dense `(K2, K12)` for stiffness `m`.
pub fn assemble(m: Stiffness, grid: Grid) -> (KernelMatrix, KernelMatrix) {
    assemble_with(m, grid, Exec::default())
}

pub fn assemble_with(m: Stiffness, grid: Grid, exec: Exec) -> (KernelMatrix, KernelMatrix) {
    let pair = NystromPair::with_exec(m, grid, exec);
    let k12 = pair.composed(exec);
    (pair.k2, k12)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use crate::numerics::second_difference;

    fn naive_g2(t: f64, s: f64, m: f64) -> f64 {
        let k = m.sqrt();
        let (lo, hi) = if t <= s { (t, s) } else { (s, t) };
        (k * lo).sinh() * (k * (1.0 - hi)).sinh() / (k * k.sinh())
    }

    #[test]
    fn g1_examples() {
        assert_eq!(g1(0.25, 0.5).unwrap(), 0.125);
        assert_eq!(g1(0.5, 0.5).unwrap(), 0.25);
        for t in [0.0, 0.3, 1.0] {
            assert_eq!(g1(0.0, t).unwrap(), 0.0);
        }
    }

    #[test]
    fn g1_rejects_out_of_range() {
        assert!(matches!(g1(1.5, 0.2), Err(Error::Domain { .. })));
        assert!(matches!(g1(0.2, -0.1), Err(Error::Domain { .. })));
    }

    #[test]
    fn g2_examples() {
        let v = g2(0.5, 0.5, 1.0).unwrap();
        let expect = 0.5f64.sinh().powi(2) / 1.0f64.sinh();
        assert!((v - expect).abs() < 1e-15);
        assert!((v - 0.2310586).abs() < 1e-7);
        for s in [0.0, 0.4, 1.0] {
            assert_eq!(g2(0.0, s, 7.0).unwrap(), 0.0);
        }
        let big = g2(0.5, 0.5, 1e6).unwrap();
        assert!((big - 5.0e-4).abs() < 1e-9);
    }

    #[test]
    fn g2_rejects_nonpositive_stiffness() {
        assert!(matches!(g2(0.5, 0.5, 0.0), Err(Error::Domain { .. })));
        assert!(matches!(g2(0.5, 0.5, -1.0), Err(Error::Domain { .. })));
        assert!(matches!(g2(0.5, 0.5, f64::NAN), Err(Error::Domain { .. })));
    }

    #[test]
    fn g2_finite_at_huge_stiffness() {
        let m = 1e12;
        let v = g2(0.5, 0.5, m).unwrap();
        assert!(v.is_finite() && v > 0.0);
        assert!((v * 2.0 * m.sqrt() - 1.0).abs() < 1e-6);
        assert!(g2(0.2, 0.9, m).unwrap().is_finite());
    }

    #[test]
    fn g2_small_stiffness_tends_to_g1() {
        let v = g2(0.3, 0.7, 1e-14).unwrap();
        assert!((v - g1(0.3, 0.7).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn kernel_bound_at_diagonal_midpoint() {
        let a: f64 = 2.0;
        let bound = (a.sqrt() / 2.0).sinh().powi(2) / (a.sqrt() * a.sqrt().sinh());
        assert!((g2(0.5, 0.5, a).unwrap() - bound).abs() < 1e-15);
    }

    #[test]
    fn apply_to_zero_is_zero() {
        let grid = Grid::new(33).unwrap();
        let pair = NystromPair::new(Stiffness::new(3.0).unwrap(), grid);
        let (u, w) = pair.apply(&GridFunction::zeros(grid));
        assert!(u.values().iter().all(|&v| v == 0.0));
        assert!(w.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn entries_nonnegative_and_boundary_rows_vanish() {
        let grid = Grid::new(65).unwrap();
        let (k2, k12) = assemble(Stiffness::new(5.0).unwrap(), grid);
        for k in [&k2, &k12] {
            assert!(k.entries().iter().all(|&e| e >= 0.0));
            assert!(k.row(0).iter().all(|&e| e == 0.0));
            assert!(k.row(64).iter().all(|&e| e == 0.0));
        }
    }

    #[test]
    fn composed_matches_two_step_application() {
        let grid = Grid::new(65).unwrap();
        let pair = NystromPair::new(Stiffness::new(2.5).unwrap(), grid);
        let k12 = pair.composed(Exec::Serial);
        let g = GridFunction::from_fn(grid, |x| 1.0 + x * x);
        let direct = k12.apply(&g);
        let two_step = pair.apply_u(&g);
        let d = (&direct - &two_step).sup_norm();
        assert!(d < 1e-15, "{d}");
    }

    #[test]
    fn g1_rule_is_sixth_order_on_exponential_load() {
        // -u'' = eˣ, u(0) = u(1) = 0.
        let err = |n: usize| {
            let grid = Grid::new(n).unwrap();
            let g = GridFunction::from_fn(grid, f64::exp);
            let exact =
                GridFunction::from_fn(grid, |x| 1.0 + (std::f64::consts::E - 1.0) * x - x.exp());
            (&g1_matrix(grid, Exec::Serial).apply(&g) - &exact).sup_norm()
        };
        let (coarse, fine) = (err(33), err(65));
        assert!(fine < 1e-12);
        assert!((coarse / fine).log2() > 5.5);
    }

    #[test]
    fn g2_rule_matches_constant_load_solution() {
        // -w'' + m w = 1 gives w = (1 - cosh(k(x - ½)) / cosh(k/2)) / m.
        let m = 40.0f64;
        let k = m.sqrt();
        let grid = Grid::new(129).unwrap();
        let pair = NystromPair::new(Stiffness::new(m).unwrap(), grid);
        let exact = GridFunction::from_fn(grid, |x| {
            (1.0 - (k * (x - 0.5)).cosh() / (k / 2.0).cosh()) / m
        });
        let w = pair.apply_w(&GridFunction::constant(grid, 1.0));
        assert!((&w - &exact).sup_norm() < 1e-13);
    }

    #[test]
    fn quadrature_error_is_smooth_across_rows() {
        // A fourth difference magnifies row-to-row noise by 16/h⁴, so a
        // small stencil residual means the error varies smoothly.
        let grid = Grid::new(257).unwrap();
        let pair = NystromPair::new(Stiffness::new(3.0).unwrap(), grid);
        let g = GridFunction::from_fn(grid, |x| 1.0 + x * x * (2.0 * x).exp());
        let u = pair.apply_u(&g);
        let d4 = second_difference(&second_difference(&u));
        let d2 = second_difference(&u);
        let n = grid.len();
        let res = (3..n - 3)
            .map(|i| (d4.values()[i] - 3.0 * d2.values()[i] - g.values()[i]).abs())
            .fold(0.0, f64::max);
        assert!(res < 1e-3, "{res}");
    }

    #[test]
    fn stiff_fallback_keeps_entries_nonnegative() {
        let grid = Grid::new(65).unwrap();
        let pair = NystromPair::new(Stiffness::new(1e6).unwrap(), grid);
        assert!(pair.k2().entries().iter().all(|&v| v >= 0.0));
        let w = pair.apply_w(&GridFunction::constant(grid, 1.0));
        assert!(w.values().iter().all(|v| v.is_finite()));
    }

    #[test]
    fn serial_and_parallel_assembly_are_bit_identical() {
        let grid = Grid::new(129).unwrap();
        let m = Stiffness::new(40.0).unwrap();
        let (a2, a12) = assemble_with(m, grid, Exec::Serial);
        let (b2, b12) = assemble_with(m, grid, Exec::Parallel);
        assert_eq!(a2, b2);
        assert_eq!(a12, b12);
    }

    proptest! {
        #[test]
        fn kernels_symmetric(x in 0.0f64..=1.0, t in 0.0f64..=1.0, m in 1e-3f64..1e4) {
            prop_assert_eq!(g1(x, t).unwrap(), g1(t, x).unwrap());
            prop_assert_eq!(g2(x, t, m).unwrap(), g2(t, x, m).unwrap());
        }

        #[test]
        fn kernel_pointwise_bounds(
            x in 0.0f64..=1.0, t in 0.0f64..=1.0,
            a in 1e-2f64..50.0, extra in 0.0f64..1e3,
        ) {
            let m = a + extra;
            let g = g1(x, t).unwrap();
            prop_assert!(g >= 0.0 && g <= g1(x, x).unwrap());
            let v = g2(x, t, m).unwrap();
            let diag = g2(x, x, m).unwrap();
            let bound = (a.sqrt() / 2.0).sinh().powi(2) / (a.sqrt() * a.sqrt().sinh());
            prop_assert!(v >= 0.0);
            prop_assert!(v <= diag * (1.0 + 1e-14));
            prop_assert!(diag <= bound * (1.0 + 1e-12));
        }

        #[test]
        fn g2_decreasing_in_stiffness(
            t in 0.01f64..0.99, s in 0.01f64..0.99,
            m1 in 1e-2f64..1e3, dm in 1e-3f64..1e3,
        ) {
            prop_assert!(g2(t, s, m1).unwrap() >= g2(t, s, m1 + dm).unwrap());
        }

        #[test]
        fn g2_matches_naive_formula(
            t in 0.0f64..=1.0, s in 0.0f64..=1.0, log_m in -6.0f64..12.0,
        ) {
            let m = 10f64.powf(log_m);
            let stable = g2(t, s, m).unwrap();
            prop_assert!(stable.is_finite());
            let naive = naive_g2(t, s, m);
            if naive.is_finite() && naive > 1e-300 {
                prop_assert!((stable - naive).abs() <= 1e-12 * naive,
                    "t={} s={} m={} stable={} naive={}", t, s, m, stable, naive);
            }
        }
    }
}

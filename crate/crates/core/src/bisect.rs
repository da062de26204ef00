//! Scalar bracketing for the outer fixed point `R = y(R)`.

use crate::error::{Error, Result};

pub(crate) const MAX_BISECTIONS: usize = 60;
const MAX_DOUBLINGS: usize = 200;
pub(crate) const PROBE_POINTS: usize = 64;

#[derive(Clone, Copy, Debug)]
pub(crate) struct Root {
    pub r: f64,
    pub bracket: (f64, f64),
    pub iterations: usize,
}

/// Grow `hi` by doubling until `φ(hi) > 0`. Returns the last point with
/// `φ ≤ 0` (or `lo`) and the first with `φ > 0`.
pub(crate) fn grow_upper(
    phi: &mut impl FnMut(f64) -> Result<f64>,
    lo: f64,
    start: f64,
) -> Result<(f64, f64)> {
    let mut lo = lo;
    let mut hi = start;
    for _ in 0..MAX_DOUBLINGS {
        if phi(hi)? > 0.0 {
            return Ok((lo, hi));
        }
        lo = hi;
        hi *= 2.0;
    }
    Err(Error::ConvergenceFailure {
        what: "bracket doubling",
        iterations: MAX_DOUBLINGS,
        last: None,
    })
}

/// `0` followed by 63 log-spaced points from `hi·1e-12` to `hi`.
pub(crate) fn log_probe(hi: f64) -> Vec<f64> {
    let last = (PROBE_POINTS - 1) as f64;
    let mut pts = vec![0.0];
    pts.extend((1..PROBE_POINTS).map(|k| {
        let e = -12.0 * (last - k as f64) / (last - 1.0);
        hi * 10f64.powf(e)
    }));
    pts
}

/// Bisection for a root of `φ` on `[lo, hi]` with `φ(lo) ≤ 0 < φ(hi)`.
///
/// Stops once the half-width and `|φ(mid)|` are both within `tol`, or the
/// bracket can no longer be split in floating point.
pub(crate) fn bisect(
    phi: &mut impl FnMut(f64) -> Result<f64>,
    mut lo: f64,
    mut hi: f64,
    tol: f64,
) -> Result<Root> {
    for it in 1..=MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        let v = phi(mid)?;
        let done = (0.5 * (hi - lo) <= tol && v.abs() <= tol) || v == 0.0;
        if done || mid <= lo || mid >= hi {
            return Ok(Root {
                r: mid,
                bracket: (lo, hi),
                iterations: it,
            });
        }
        if v > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Err(Error::ConvergenceFailure {
        what: "bisection",
        iterations: MAX_BISECTIONS,
        last: None,
    })
}

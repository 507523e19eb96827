//! One-dimensional bracketing root finding and golden-section search.

use crate::{Error, Result};

/// Bisection for a root of `g` on `[lo, hi]`.
///
/// Needs `g(lo)` and `g(hi)` of opposite sign (or one of them zero). Stops when
/// the bracket is narrower than `tol` or after `max_iter` halvings, returning
/// the midpoint.
pub fn bisect<G>(mut g: G, lo: f64, hi: f64, tol: f64, max_iter: usize) -> Result<f64>
where
    G: FnMut(f64) -> f64,
{
    let (mut a, mut b) = (lo, hi);
    let mut ga = g(a);
    let gb = g(b);
    if ga == 0.0 {
        return Ok(a);
    }
    if gb == 0.0 {
        return Ok(b);
    }
    if !(ga.is_finite() && gb.is_finite()) || ga.signum() == gb.signum() {
        return Err(Error::NoSignChange {
            lo,
            hi,
            g_lo: ga,
            g_hi: gb,
        });
    }
    for _ in 0..max_iter {
        let mid = 0.5 * (a + b);
        if b - a <= tol || mid <= a || mid >= b {
            break;
        }
        let gm = g(mid);
        if gm == 0.0 {
            return Ok(mid);
        }
        if gm.signum() == ga.signum() {
            a = mid;
            ga = gm;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section search for a maximum of a unimodal `f` on `[lo, hi]`.
///
/// Returns `(argmax, max)` once the bracket is narrower than `tol`. The
/// bracket endpoints are evaluated too, so a maximum sitting on the boundary
/// is found.
pub fn golden_max<F>(mut f: F, lo: f64, hi: f64, tol: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    let mut iter = 0;
    while b - a > tol && iter < 200 {
        iter += 1;
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d)?;
        }
    }
    let mut best = if fc >= fd { (c, fc) } else { (d, fd) };
    for t in [lo, hi] {
        let ft = f(t)?;
        if ft > best.1 {
            best = (t, ft);
        }
    }
    Ok(best)
}

//! Bracketing bisection for monotone scalar equations.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Outcome of a bisection search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root<T> {
    pub x: T,
    pub iterations: usize,
}

const MAX_ITER: usize = 400;

/// Bisection on `[lo, hi]` for a function whose sign differs at the ends.
///
/// `f` may return `+inf`/`-inf` to signal "left/right of the root"; only the
/// sign is used. Stops when the bracket shrinks to adjacent floats or to
/// `x_tol` relative width. When `geometric` is set the midpoint is the
/// geometric mean, which suits positive variables spanning many decades.
pub fn bisect<T, F>(
    what: &'static str,
    mut f: F,
    lo: T,
    hi: T,
    x_tol: T,
    geometric: bool,
) -> Result<Root<T>>
where
    T: Scalar,
    F: FnMut(T) -> T,
{
    let (mut a, mut b) = (lo, hi);
    let fa = f(a);
    let fb = f(b);
    if fa == T::zero() {
        return Ok(Root { x: a, iterations: 0 });
    }
    if fb == T::zero() {
        return Ok(Root { x: b, iterations: 0 });
    }
    if fa.is_nan() || fb.is_nan() || fa.signum() == fb.signum() {
        return Err(Error::NoSignChange {
            what,
            lo: lo.as_f64(),
            hi: hi.as_f64(),
        });
    }
    let a_negative = fa < T::zero();
    let half = T::lit(0.5);
    for it in 1..=MAX_ITER {
        let mid = if geometric { (a * b).sqrt() } else { half * (a + b) };
        if !(mid > a.min(b) && mid < a.max(b)) || (b - a).abs() <= x_tol * mid.abs() {
            return Ok(Root { x: mid, iterations: it });
        }
        let fm = f(mid);
        if fm == T::zero() {
            return Ok(Root { x: mid, iterations: it });
        }
        if fm.is_nan() {
            return Err(Error::Domain(format!("{what}: NaN at {mid}")));
        }
        if (fm < T::zero()) == a_negative {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(Root {
        x: half * (a + b),
        iterations: MAX_ITER,
    })
}

/// Expands `[lo, hi]` geometrically (both ends, factor 2^k) until `f` changes
/// sign, giving up once `hi` would exceed `limit_hi` and `lo` would drop
/// below `limit_lo`.
pub fn expand_bracket<T, F>(
    what: &'static str,
    mut f: F,
    mut lo: T,
    mut hi: T,
    limit_lo: T,
    limit_hi: T,
) -> Result<(T, T)>
where
    T: Scalar,
    F: FnMut(T) -> T,
{
    let mut factor = T::lit(2.0);
    let mut flo = f(lo);
    let mut fhi = f(hi);
    loop {
        if !flo.is_nan() && !fhi.is_nan() && flo.signum() != fhi.signum() {
            return Ok((lo, hi));
        }
        let can_lo = lo > limit_lo;
        let can_hi = hi < limit_hi;
        if !can_lo && !can_hi {
            return Err(Error::NoSignChange {
                what,
                lo: lo.as_f64(),
                hi: hi.as_f64(),
            });
        }
        if can_lo {
            lo = (lo / factor).max(limit_lo);
            flo = f(lo);
        }
        if can_hi {
            hi = (hi * factor).min(limit_hi);
            fhi = f(hi);
        }
        factor = factor * factor;
    }
}

//! Bracketed scalar root finding (Brent's method with bisection fallback).

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Default absolute bracket tolerance.
pub const DEFAULT_ROOT_TOL: f64 = 1e-12;
const MAX_ITER: usize = 500;

/// Outcome of a bracketed search: the best iterate and the final sign-changing
/// bracket around it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracketed<T> {
    pub root: T,
    pub lo: T,
    pub hi: T,
    pub iterations: usize,
}

impl<T: Scalar> Bracketed<T> {
    pub fn width(&self) -> T {
        self.hi - self.lo
    }
}

/// Root of `f` in `[lo, hi]`. `f(lo)` and `f(hi)` must differ in sign.
pub fn find_root<T: Scalar>(f: impl FnMut(T) -> T, lo: T, hi: T, tol: T) -> Result<T> {
    brent(f, lo, hi, tol).map(|b| b.root)
}

/// Brent's method. The bracket shrinks until its width is below
/// `max(tol, 4ε|root|)`; every iterate keeps a sign change.
pub fn brent<T: Scalar>(mut f: impl FnMut(T) -> T, lo: T, hi: T, tol: T) -> Result<Bracketed<T>> {
    let (lo, hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut eval = |x: T| -> Result<T> {
        let y = f(x);
        if y.is_finite() {
            Ok(y)
        } else {
            Err(Error::NonFinite { at: x.as_f64() })
        }
    };
    let two = T::lit(2.0);
    let rtol = T::lit(4.0) * T::epsilon();

    let mut xpre = lo;
    let mut xcur = hi;
    let mut fpre = eval(xpre)?;
    let mut fcur = eval(xcur)?;
    if fpre == T::zero() {
        return Ok(Bracketed {
            root: xpre,
            lo: xpre,
            hi: xpre,
            iterations: 0,
        });
    }
    if fcur == T::zero() {
        return Ok(Bracketed {
            root: xcur,
            lo: xcur,
            hi: xcur,
            iterations: 0,
        });
    }
    if fpre.signum() == fcur.signum() {
        return Err(Error::NoSignChange {
            lo: lo.as_f64(),
            hi: hi.as_f64(),
        });
    }

    let mut xblk = T::zero();
    let mut fblk = T::zero();
    let mut spre = T::zero();
    let mut scur = T::zero();

    for it in 1..=MAX_ITER {
        if fpre != T::zero() && fcur != T::zero() && fpre.signum() != fcur.signum() {
            xblk = xpre;
            fblk = fpre;
            spre = xcur - xpre;
            scur = spre;
        }
        if fblk.abs() < fcur.abs() {
            xpre = xcur;
            xcur = xblk;
            xblk = xpre;
            fpre = fcur;
            fcur = fblk;
            fblk = fpre;
        }

        let delta = tol.max(rtol * xcur.abs()) / two;
        let sbis = (xblk - xcur) / two;
        if fcur == T::zero() || sbis.abs() < delta {
            let (l, h) = if xcur < xblk { (xcur, xblk) } else { (xblk, xcur) };
            return Ok(Bracketed {
                root: xcur,
                lo: l,
                hi: h,
                iterations: it,
            });
        }

        if spre.abs() > delta && fcur.abs() < fpre.abs() {
            let stry = if xpre == xblk {
                // secant
                -fcur * (xcur - xpre) / (fcur - fpre)
            } else {
                // inverse quadratic interpolation
                let dpre = (fpre - fcur) / (xpre - xcur);
                let dblk = (fblk - fcur) / (xblk - xcur);
                -fcur * (fblk * dblk - fpre * dpre) / (dblk * dpre * (fblk - fpre))
            };
            if two * stry.abs() < spre.abs().min(T::lit(3.0) * sbis.abs() - delta) {
                spre = scur;
                scur = stry;
            } else {
                spre = sbis;
                scur = sbis;
            }
        } else {
            spre = sbis;
            scur = sbis;
        }

        xpre = xcur;
        fpre = fcur;
        if scur.abs() > delta {
            xcur = xcur + scur;
        } else {
            xcur = xcur + if sbis > T::zero() { delta } else { -delta };
        }
        fcur = eval(xcur)?;
    }
    let (l, h) = if xcur < xblk { (xcur, xblk) } else { (xblk, xcur) };
    Ok(Bracketed {
        root: xcur,
        lo: l,
        hi: h,
        iterations: MAX_ITER,
    })
}

/// Plain bisection; used where only the sign of `f` is trustworthy.
pub fn bisect<T: Scalar>(mut f: impl FnMut(T) -> T, lo: T, hi: T, tol: T) -> Result<Bracketed<T>> {
    let (mut lo, mut hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let flo = f(lo);
    let fhi = f(hi);
    if !flo.is_finite() {
        return Err(Error::NonFinite { at: lo.as_f64() });
    }
    if !fhi.is_finite() {
        return Err(Error::NonFinite { at: hi.as_f64() });
    }
    if flo.signum() == fhi.signum() && flo != T::zero() && fhi != T::zero() {
        return Err(Error::NoSignChange {
            lo: lo.as_f64(),
            hi: hi.as_f64(),
        });
    }
    let neg_at_lo = flo < T::zero();
    let mut it = 0;
    let half = T::lit(0.5);
    while hi - lo > tol && it < MAX_ITER {
        let mid = lo + (hi - lo) * half;
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if !fm.is_finite() {
            return Err(Error::NonFinite { at: mid.as_f64() });
        }
        if (fm < T::zero()) == neg_at_lo {
            lo = mid;
        } else {
            hi = mid;
        }
        it += 1;
    }
    Ok(Bracketed {
        root: lo + (hi - lo) * half,
        lo,
        hi,
        iterations: it,
    })
}

//! Bracketed scalar root finding.
//!
//! Every curve the solvers intersect is monotone on the window where a root
//! is sought, so a sign-changing bracket is always available. The iteration
//! combines bisection with secant and inverse quadratic steps (Brent), and
//! runs to machine resolution unless a coarser `x_tol` is supplied.

use crate::error::{Error, Result};
use crate::scalar::Real;

pub(crate) const MAX_ITERATIONS: usize = 200;

/// Geometric bracket growth never needs more steps than the exponent range.
const MAX_GROWTH_STEPS: usize = 1100;

#[derive(Debug, Clone, Copy)]
pub(crate) struct Bracket<T> {
    pub lo: T,
    pub hi: T,
    pub f_lo: T,
    pub f_hi: T,
}

fn opposite<T: Real>(a: T, b: T) -> bool {
    a == T::zero() || b == T::zero() || (a > T::zero()) != (b > T::zero())
}

/// Finds a root of `f` in `[lo, hi]` given the endpoint values.
pub(crate) fn brent<T, F>(what: &'static str, mut f: F, bracket: Bracket<T>, x_tol: T) -> Result<T>
where
    T: Real,
    F: FnMut(T) -> T,
{
    let Bracket { lo, hi, f_lo, f_hi } = bracket;
    if f_lo.is_nan() || f_hi.is_nan() || !opposite(f_lo, f_hi) {
        return Err(Error::Bracket {
            what,
            lo: lo.f64(),
            hi: hi.f64(),
        });
    }
    if f_lo == T::zero() {
        return Ok(lo);
    }
    if f_hi == T::zero() {
        return Ok(hi);
    }
    let two = T::lit(2.0);
    let half = T::lit(0.5);
    let three = T::lit(3.0);
    let (mut a, mut b, mut fa, mut fb) = (lo, hi, f_lo, f_hi);
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..MAX_ITERATIONS {
        if (fb > T::zero()) == (fc > T::zero()) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = two * T::epsilon() * b.abs() + half * x_tol;
        let xm = half * (c - b);
        if xm.abs() <= tol || fb == T::zero() {
            return Ok(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = two * xm * s;
                q = T::one() - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (two * xm * qa * (qa - r) - (b - a) * (r - T::one()));
                q = (qa - T::one()) * (r - T::one()) * (s - T::one());
            }
            if p > T::zero() {
                q = -q;
            }
            p = p.abs();
            if two * p < (three * xm * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b = if d.abs() > tol {
            b + d
        } else {
            b + tol.copysign(xm)
        };
        fb = f(b);
        if fb.is_nan() {
            return Err(Error::Bracket {
                what,
                lo: a.f64(),
                hi: b.f64(),
            });
        }
    }
    Err(Error::NoConvergence {
        what,
        iterations: MAX_ITERATIONS,
    })
}

/// Grows `[x0, x0·2^k]` until `f` changes sign.
pub(crate) fn bracket_up<T, F>(what: &'static str, f: &mut F, x0: T, f0: T) -> Result<Bracket<T>>
where
    T: Real,
    F: FnMut(T) -> T,
{
    grow(what, f, x0, f0, T::lit(2.0))
}

/// Shrinks `[x0·2^-k, x0]` until `f` changes sign.
pub(crate) fn bracket_down<T, F>(what: &'static str, f: &mut F, x0: T, f0: T) -> Result<Bracket<T>>
where
    T: Real,
    F: FnMut(T) -> T,
{
    grow(what, f, x0, f0, T::lit(0.5))
}

fn grow<T, F>(what: &'static str, f: &mut F, x0: T, f0: T, factor: T) -> Result<Bracket<T>>
where
    T: Real,
    F: FnMut(T) -> T,
{
    let (mut prev, mut f_prev) = (x0, f0);
    for _ in 0..MAX_GROWTH_STEPS {
        let x = prev * factor;
        if !x.is_finite() || x <= T::zero() {
            break;
        }
        let fx = f(x);
        if fx.is_nan() {
            break;
        }
        if opposite(f_prev, fx) {
            return Ok(if factor > T::one() {
                Bracket {
                    lo: prev,
                    hi: x,
                    f_lo: f_prev,
                    f_hi: fx,
                }
            } else {
                Bracket {
                    lo: x,
                    hi: prev,
                    f_lo: fx,
                    f_hi: f_prev,
                }
            });
        }
        prev = x;
        f_prev = fx;
    }
    Err(Error::Bracket {
        what,
        lo: x0.min(prev).f64(),
        hi: x0.max(prev).f64(),
    })
}

//! Classic fourth-order Runge–Kutta with step-doubling error control.
//!
//! Each step is taken once with `h` and twice with `h/2`; the difference
//! estimates the local error and the pair is Richardson-extrapolated.

use crate::error::{Error, Result};
use crate::scalar::Real;

pub(crate) const MAX_STEPS: usize = 200_000;

#[derive(Debug, Clone, Copy)]
pub(crate) struct Stepper<T> {
    pub tol: T,
}

pub(crate) enum Step<T, const N: usize> {
    Accepted { y: [T; N], next_h: T },
    Rejected { next_h: T },
}

impl<T: Real> Stepper<T> {
    pub(crate) fn new(tol: T) -> Self {
        Self { tol }
    }

    pub(crate) fn rk4<F, const N: usize>(f: &mut F, x: T, y: &[T; N], h: T) -> Result<[T; N]>
    where
        F: FnMut(T, &[T; N]) -> Result<[T; N]>,
    {
        let half = T::lit(0.5);
        let sixth = T::one() / T::lit(6.0);
        let k1 = f(x, y)?;
        let y2 = std::array::from_fn(|i| y[i] + half * h * k1[i]);
        let k2 = f(x + half * h, &y2)?;
        let y3 = std::array::from_fn(|i| y[i] + half * h * k2[i]);
        let k3 = f(x + half * h, &y3)?;
        let y4 = std::array::from_fn(|i| y[i] + h * k3[i]);
        let k4 = f(x + h, &y4)?;
        Ok(std::array::from_fn(|i| {
            y[i] + h * sixth * (k1[i] + T::lit(2.0) * (k2[i] + k3[i]) + k4[i])
        }))
    }

    /// Extrapolated step of size `h` with its scaled error estimate.
    pub(crate) fn doubled<F, const N: usize>(
        &self,
        f: &mut F,
        x: T,
        y: &[T; N],
        h: T,
    ) -> Result<([T; N], T)>
    where
        F: FnMut(T, &[T; N]) -> Result<[T; N]>,
    {
        let half = T::lit(0.5) * h;
        let full = Self::rk4(f, x, y, h)?;
        let mid = Self::rk4(f, x, y, half)?;
        let fine = Self::rk4(f, x + half, &mid, half)?;
        let fifteen = T::lit(15.0);
        let mut err = T::zero();
        for i in 0..N {
            let scale = self.tol * y[i].abs().max(fine[i].abs()).max(T::one());
            err = err.max((fine[i] - full[i]).abs() / (fifteen * scale));
        }
        if !err.is_finite() {
            err = T::infinity();
        }
        Ok((
            std::array::from_fn(|i| fine[i] + (fine[i] - full[i]) / fifteen),
            err,
        ))
    }

    pub(crate) fn try_step<F, const N: usize>(
        &self,
        f: &mut F,
        x: T,
        y: &[T; N],
        h: T,
    ) -> Result<Step<T, N>>
    where
        F: FnMut(T, &[T; N]) -> Result<[T; N]>,
    {
        let (candidate, err) = match self.doubled(f, x, y, h) {
            Ok(v) => v,
            // A trial point stepping past a singularity is retried smaller.
            Err(Error::Singularity { .. })
                if h.abs() > T::epsilon() * x.abs().max(T::one()) * T::lit(1e3) =>
            {
                return Ok(Step::Rejected {
                    next_h: h * T::lit(0.25),
                });
            }
            Err(e) => return Err(e),
        };
        let safety = T::lit(0.9);
        let fifth = T::lit(0.2);
        if err <= T::one() {
            let grow = if err == T::zero() {
                T::lit(4.0)
            } else {
                (safety * err.powf(-fifth)).min(T::lit(4.0))
            };
            Ok(Step::Accepted {
                y: candidate,
                next_h: h * grow.max(T::one()),
            })
        } else {
            let shrink = (safety * err.powf(-fifth)).clamp(T::lit(0.1), T::lit(0.5));
            Ok(Step::Rejected { next_h: h * shrink })
        }
    }

    /// Integrates from `x0` to `x1` (either direction), reporting every
    /// accepted point to `observe`.
    pub(crate) fn integrate<F, O, const N: usize>(
        &self,
        mut f: F,
        x0: T,
        y0: [T; N],
        x1: T,
        mut observe: O,
    ) -> Result<[T; N]>
    where
        F: FnMut(T, &[T; N]) -> Result<[T; N]>,
        O: FnMut(T, &[T; N]),
    {
        let span = x1 - x0;
        if span == T::zero() {
            return Ok(y0);
        }
        let mut x = x0;
        let mut y = y0;
        let mut h = span / T::lit(16.0);
        let min_h = span.abs() * T::epsilon() * T::lit(16.0);
        for _ in 0..MAX_STEPS {
            let remaining = x1 - x;
            let last = h.abs() >= remaining.abs();
            if last {
                h = remaining;
            }
            match self.try_step(&mut f, x, &y, h)? {
                Step::Accepted { y: next, next_h } => {
                    x = if last { x1 } else { x + h };
                    y = next;
                    observe(x, &y);
                    if last {
                        return Ok(y);
                    }
                    h = next_h;
                }
                Step::Rejected { next_h } => {
                    if next_h.abs() < min_h {
                        return Err(Error::NoConvergence {
                            what: "section ODE (step size underflow)",
                            iterations: 0,
                        });
                    }
                    h = next_h;
                }
            }
        }
        Err(Error::NoConvergence {
            what: "section ODE",
            iterations: MAX_STEPS,
        })
    }
}

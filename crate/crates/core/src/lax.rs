//! Lax curves of both families, their reversed counterparts, and the
//! densities where they leave the subsonic region.

use serde::{Deserialize, Serialize};

use crate::eos::{check_density, GasLaw, State};
use crate::error::{Error, Result};
use crate::roots::{self, Bracket};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    One,
    Two,
}

impl Family {
    pub fn index(self) -> u8 {
        match self {
            Family::One => 1,
            Family::Two => 2,
        }
    }
}

/// Forward curves are parameterised by the left state of the wave, reversed
/// curves by its right state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    Forward,
    Reversed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    Left,
    Right,
}

/// Densities where a Lax curve meets `λ₁ = 0` (`fu`) and `λ₂ = 0` (`fd`).
///
/// On the left side the curve is `L₁(·; ū)` and `fu ≤ ρ̄ ≤ fd`; on the right
/// side it is `L₂⁻(·; ū)` and `fd ≤ ρ̄ ≤ fu`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SonicBounds<T> {
    pub fu: T,
    pub fd: T,
}

impl<T: Real> SonicBounds<T> {
    /// The subsonic density window, ordered.
    pub fn window(&self) -> (T, T) {
        (self.fu.min(self.fd), self.fu.max(self.fd))
    }
}

/// `∫_{ρ₀}^{ρ} c(r)/r dr`.
pub fn rarefaction_integral<T: Real>(law: &GasLaw<T>, rho0: T, rho: T) -> Result<T> {
    check_density(rho0)?;
    check_density(rho)?;
    Ok(rarefaction_term(law, law.c(rho0), rho0, rho))
}

fn rarefaction_term<T: Real>(law: &GasLaw<T>, c0: T, rho0: T, rho: T) -> T {
    let log_ratio = (rho / rho0).ln();
    if law.is_isothermal() {
        c0 * log_ratio
    } else {
        // 2/(γ−1)·(c(ρ) − c(ρ₀)) written so that γ → 1 loses no digits.
        let half_excess = (law.gamma - T::one()) / T::lit(2.0);
        c0 * (half_excess * log_ratio).exp_m1() / half_excess
    }
}

/// One of `L₁`, `L₂`, `L₁⁻`, `L₂⁻` through a fixed base state.
#[derive(Debug, Clone, Copy)]
pub struct LaxCurve<T> {
    law: GasLaw<T>,
    base: State<T>,
    family: Family,
    direction: Direction,
    c0: T,
    p0: T,
}

impl<T: Real> LaxCurve<T> {
    pub fn new(
        law: &GasLaw<T>,
        family: Family,
        direction: Direction,
        base: &State<T>,
    ) -> Result<Self> {
        check_density(base.rho)?;
        Ok(Self::unchecked(law, family, direction, base))
    }

    pub(crate) fn unchecked(
        law: &GasLaw<T>,
        family: Family,
        direction: Direction,
        base: &State<T>,
    ) -> Self {
        Self {
            law: *law,
            base: *base,
            family,
            direction,
            c0: law.c(base.rho),
            p0: law.p(base.rho),
        }
    }

    /// `L₁(·; u₀)`.
    pub(crate) fn forward_1(law: &GasLaw<T>, base: &State<T>) -> Self {
        Self::unchecked(law, Family::One, Direction::Forward, base)
    }

    /// `L₂(·; u₀)`.
    pub(crate) fn forward_2(law: &GasLaw<T>, base: &State<T>) -> Self {
        Self::unchecked(law, Family::Two, Direction::Forward, base)
    }

    /// `L₂⁻(·; u₀)`.
    pub(crate) fn reversed_2(law: &GasLaw<T>, base: &State<T>) -> Self {
        Self::unchecked(law, Family::Two, Direction::Reversed, base)
    }

    pub fn base(&self) -> &State<T> {
        &self.base
    }

    pub fn family(&self) -> Family {
        self.family
    }

    fn shock_above_base(&self) -> bool {
        matches!(
            (self.family, self.direction),
            (Family::One, Direction::Forward) | (Family::Two, Direction::Reversed)
        )
    }

    fn shock_sign(&self) -> T {
        match self.direction {
            Direction::Forward => -T::one(),
            Direction::Reversed => T::one(),
        }
    }

    fn rarefaction_sign(&self) -> T {
        match self.family {
            Family::One => -T::one(),
            Family::Two => T::one(),
        }
    }

    fn on_shock_branch(&self, rho: T) -> bool {
        if self.shock_above_base() {
            rho > self.base.rho
        } else {
            rho < self.base.rho
        }
    }

    fn shock_radicand(&self, rho: T) -> T {
        let r0 = self.base.rho;
        ((rho / r0) * (rho - r0) * (self.law.p(rho) - self.p0)).max(T::zero())
    }

    /// Momentum on the curve at density `rho`, checked.
    pub fn value(&self, rho: T) -> Result<T> {
        check_density(rho)?;
        Ok(self.at(rho))
    }

    pub(crate) fn at(&self, rho: T) -> T {
        let r0 = self.base.rho;
        let transported = rho / r0 * self.base.q;
        if self.on_shock_branch(rho) {
            transported + self.shock_sign() * self.shock_radicand(rho).sqrt()
        } else {
            transported
                + self.rarefaction_sign() * rho * rarefaction_term(&self.law, self.c0, r0, rho)
        }
    }

    /// `dq/dρ` along the curve.
    #[cfg(test)]
    pub(crate) fn slope(&self, rho: T) -> T {
        let r0 = self.base.rho;
        let transported = self.base.q / r0;
        let s = self.shock_radicand(rho).sqrt();
        if self.on_shock_branch(rho) && s > T::zero() {
            let dp = self.law.p(rho) - self.p0;
            let d_radicand =
                ((rho - r0) * dp + rho * dp + rho * (rho - r0) * self.law.dp(rho)) / r0;
            transported + self.shock_sign() * d_radicand / (T::lit(2.0) * s)
        } else {
            let integral = rarefaction_term(&self.law, self.c0, r0, rho);
            transported + self.rarefaction_sign() * (integral + self.law.c(rho))
        }
    }

    pub(crate) fn state(&self, rho: T) -> State<T> {
        State {
            rho,
            q: self.at(rho),
        }
    }
}

/// Evaluates `L₁`, `L₂`, `L₁⁻` or `L₂⁻` through `u0` at density `rho`.
pub fn lax_curve<T: Real>(
    law: &GasLaw<T>,
    family: Family,
    direction: Direction,
    rho: T,
    u0: &State<T>,
) -> Result<T> {
    LaxCurve::new(law, family, direction, u0)?.value(rho)
}

/// Sonic-boundary densities of `L₁(·; u0)` (left) or `L₂⁻(·; u0)` (right).
pub fn sonic_bounds<T: Real>(law: &GasLaw<T>, u0: &State<T>, side: Side) -> Result<SonicBounds<T>> {
    check_density(u0.rho)?;
    let l1 = law.l1(u0);
    let l2 = law.l2(u0);
    if l1 > T::zero() || l2 < T::zero() {
        return Err(Error::NotSubsonic {
            rho: u0.rho.f64(),
            q: u0.q.f64(),
        });
    }
    let curve = match side {
        Side::Left => LaxCurve::forward_1(law, u0),
        Side::Right => LaxCurve::reversed_2(law, u0),
    };
    let lambda1_on = |rho: T| law.l1(&curve.state(rho));
    let lambda2_on = |rho: T| law.l2(&curve.state(rho));
    // Left: λ₁ vanishes below ρ̄, λ₂ above. Right: the other way round.
    let (fu, fd) = match side {
        Side::Left => (
            sonic_root("sonic bound fu (left)", lambda1_on, u0.rho, l1, false)?,
            sonic_root("sonic bound fd (left)", lambda2_on, u0.rho, l2, true)?,
        ),
        Side::Right => (
            sonic_root("sonic bound fu (right)", lambda1_on, u0.rho, l1, true)?,
            sonic_root("sonic bound fd (right)", lambda2_on, u0.rho, l2, false)?,
        ),
    };
    Ok(SonicBounds { fu, fd })
}

fn sonic_root<T: Real, F: FnMut(T) -> T>(
    what: &'static str,
    mut f: F,
    rho0: T,
    f0: T,
    upward: bool,
) -> Result<T> {
    if f0 == T::zero() {
        return Ok(rho0);
    }
    let bracket = if upward {
        roots::bracket_up(what, &mut f, rho0, f0)?
    } else {
        roots::bracket_down(what, &mut f, rho0, f0)?
    };
    roots::brent(what, f, bracket, T::zero())
}

/// Inverse `g` of `ρ ↦ L₂⁻(ρ; u_r)` on the subsonic window `[fd, fu]`.
pub fn invert_reversed_2<T: Real>(law: &GasLaw<T>, q_target: T, u_r: &State<T>) -> Result<T> {
    let bounds = sonic_bounds(law, u_r, Side::Right)?;
    ReversedInverse::new(law, u_r, &bounds).solve(q_target, T::zero())
}

/// `g` with the window and its momentum range precomputed.
#[derive(Debug, Clone, Copy)]
pub(crate) struct ReversedInverse<T> {
    curve: LaxCurve<T>,
    lo: T,
    hi: T,
    q_lo: T,
    q_hi: T,
}

impl<T: Real> ReversedInverse<T> {
    pub(crate) fn new(law: &GasLaw<T>, u_r: &State<T>, bounds: &SonicBounds<T>) -> Self {
        let curve = LaxCurve::reversed_2(law, u_r);
        let (lo, hi) = (bounds.fd, bounds.fu);
        Self {
            curve,
            lo,
            hi,
            q_lo: curve.at(lo),
            q_hi: curve.at(hi),
        }
    }

    /// Momentum range `[L₂⁻(fd), L₂⁻(fu)]`.
    pub(crate) fn range(&self) -> (T, T) {
        (self.q_lo, self.q_hi)
    }

    /// Targets beyond the range by at most `slack` (relative) are clamped to
    /// the nearest endpoint.
    pub(crate) fn solve(&self, q_target: T, slack: T) -> Result<T> {
        let scale = self.q_lo.abs().max(self.q_hi.abs()).max(T::one());
        let out_of_range = || Error::OutOfRange {
            target: q_target.f64(),
            lo: self.q_lo.f64(),
            hi: self.q_hi.f64(),
        };
        if q_target < self.q_lo {
            return if self.q_lo - q_target <= slack * scale {
                Ok(self.lo)
            } else {
                Err(out_of_range())
            };
        }
        if q_target > self.q_hi {
            return if q_target - self.q_hi <= slack * scale {
                Ok(self.hi)
            } else {
                Err(out_of_range())
            };
        }
        if q_target == self.curve.base().q {
            return Ok(self.curve.base().rho);
        }
        let f = |rho: T| self.curve.at(rho) - q_target;
        let bracket = Bracket {
            lo: self.lo,
            hi: self.hi,
            f_lo: self.q_lo - q_target,
            f_hi: self.q_hi - q_target,
        };
        roots::brent("inverse of reversed 2-curve", f, bracket, T::zero())
    }
}

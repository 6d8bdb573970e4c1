//! γ-law equation of state and the characteristic structure of the p-system.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Pressure law `p(ρ) = k·(ρ/ρ_ref)^γ` with `γ ≥ 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GasLaw<T> {
    pub gamma: T,
    pub k: T,
    pub rho_ref: T,
}

/// Density and linear momentum density at a point.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct State<T> {
    pub rho: T,
    pub q: T,
}

impl<T: Real> State<T> {
    pub fn new(rho: T, q: T) -> Result<Self> {
        check_density(rho)?;
        if !q.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "momentum must be finite, got {q}"
            )));
        }
        Ok(Self { rho, q })
    }

    /// Velocity `q/ρ`.
    pub fn velocity(&self) -> T {
        self.q / self.rho
    }

    /// The mirror image `(ρ, −q)` used by the left-right symmetry.
    pub fn reflected(&self) -> Self {
        Self {
            rho: self.rho,
            q: -self.q,
        }
    }
}

pub(crate) fn check_density<T: Real>(rho: T) -> Result<()> {
    if rho > T::zero() && rho.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain {
            what: "density",
            value: rho.f64(),
        })
    }
}

impl<T: Real> Default for GasLaw<T> {
    /// `γ = 1.4`, `p(ρ) = ρ^γ`.
    fn default() -> Self {
        Self {
            gamma: T::lit(1.4),
            k: T::one(),
            rho_ref: T::one(),
        }
    }
}

impl<T: Real> GasLaw<T> {
    pub fn new(gamma: T, k: T, rho_ref: T) -> Result<Self> {
        if !(gamma >= T::one()) || !gamma.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "gamma must be >= 1, got {gamma}"
            )));
        }
        if !(k > T::zero()) || !k.is_finite() {
            return Err(Error::Domain {
                what: "pressure scale k",
                value: k.f64(),
            });
        }
        if !(rho_ref > T::zero()) || !rho_ref.is_finite() {
            return Err(Error::Domain {
                what: "reference density",
                value: rho_ref.f64(),
            });
        }
        Ok(Self { gamma, k, rho_ref })
    }

    /// `p(ρ) = ρ^γ`.
    pub fn gamma_law(gamma: T) -> Result<Self> {
        Self::new(gamma, T::one(), T::one())
    }

    pub fn is_isothermal(&self) -> bool {
        self.gamma == T::one()
    }

    pub fn pressure(&self, rho: T) -> Result<T> {
        check_density(rho)?;
        Ok(self.p(rho))
    }

    pub fn sound_speed(&self, rho: T) -> Result<T> {
        check_density(rho)?;
        Ok(self.c(rho))
    }

    /// `p′(ρ)`.
    pub fn pressure_derivative(&self, rho: T) -> Result<T> {
        check_density(rho)?;
        Ok(self.dp(rho))
    }

    pub fn lambda1(&self, u: &State<T>) -> Result<T> {
        check_density(u.rho)?;
        Ok(self.l1(u))
    }

    pub fn lambda2(&self, u: &State<T>) -> Result<T> {
        check_density(u.rho)?;
        Ok(self.l2(u))
    }

    /// Membership of the open subsonic region `λ₁(u) < 0 < λ₂(u)`.
    pub fn is_subsonic(&self, u: &State<T>) -> Result<bool> {
        check_density(u.rho)?;
        Ok(self.subsonic(u))
    }

    /// Momentum flux `P(u) = q²/ρ + p(ρ)`.
    pub fn momentum_flux(&self, u: &State<T>) -> Result<T> {
        check_density(u.rho)?;
        Ok(self.flux(u))
    }

    // Unchecked kernels. Callers have validated densities already.

    pub(crate) fn p(&self, rho: T) -> T {
        self.k * (rho / self.rho_ref).powf(self.gamma)
    }

    pub(crate) fn dp(&self, rho: T) -> T {
        self.gamma * self.k * (rho / self.rho_ref).powf(self.gamma - T::one()) / self.rho_ref
    }

    pub(crate) fn c(&self, rho: T) -> T {
        self.dp(rho).sqrt()
    }

    pub(crate) fn l1(&self, u: &State<T>) -> T {
        u.q / u.rho - self.c(u.rho)
    }

    pub(crate) fn l2(&self, u: &State<T>) -> T {
        u.q / u.rho + self.c(u.rho)
    }

    pub(crate) fn flux(&self, u: &State<T>) -> T {
        u.q * u.q / u.rho + self.p(u.rho)
    }

    pub(crate) fn subsonic(&self, u: &State<T>) -> bool {
        self.l1(u) < T::zero() && self.l2(u) > T::zero()
    }

    /// Closed subsonic region, admitting states on the sonic boundary up to
    /// a relative slack of `slack·c(ρ)`.
    pub(crate) fn subsonic_closed(&self, u: &State<T>, slack: T) -> bool {
        let c = self.c(u.rho);
        (u.q / u.rho).abs() <= c * (T::one() + slack)
    }

    pub(crate) fn require_subsonic(&self, u: &State<T>) -> Result<()> {
        check_density(u.rho)?;
        if self.subsonic(u) {
            Ok(())
        } else {
            Err(Error::NotSubsonic {
                rho: u.rho.f64(),
                q: u.q.f64(),
            })
        }
    }

    /// Density at which `|q|/ρ = c(ρ)` for fixed momentum: the minimiser of
    /// `ρ ↦ P(ρ, q)`. Zero when `q = 0`.
    pub(crate) fn sonic_density(&self, q: T) -> T {
        if q == T::zero() {
            return T::zero();
        }
        // ρ²·p′(ρ) = q²  ⇔  γk·ρ^(γ+1) / ρ_ref^γ = q²
        let scale = self.gamma * self.k / self.rho_ref.powf(self.gamma);
        (q * q / scale).powf(T::one() / (self.gamma + T::one()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn air() -> GasLaw<f64> {
        GasLaw::default()
    }

    fn st(rho: f64, q: f64) -> State<f64> {
        State::new(rho, q).unwrap()
    }

    #[test]
    fn pressure_examples() {
        let law = air();
        assert_eq!(law.pressure(1.0).unwrap(), 1.0);
        assert!((law.pressure(2.0).unwrap() - 2.639016).abs() < 1e-6);
        let iso = GasLaw::<f64>::new(1.0, 3.0, 1.0).unwrap();
        assert!((iso.pressure(2.0).unwrap() - 6.0).abs() < 1e-14);
    }

    #[test]
    fn sound_speed_examples() {
        let law = air();
        assert!((law.sound_speed(1.0).unwrap() - 1.183216).abs() < 1e-6);
        // 30-digit reference: sqrt(1.4 * 2^0.4)
        assert!((law.sound_speed(2.0).unwrap() - 1.359158).abs() < 1e-6);
        let iso = GasLaw::gamma_law(1.0).unwrap();
        for rho in [0.1, 1.0, 7.5] {
            assert_eq!(iso.sound_speed(rho).unwrap(), 1.0);
        }
    }

    #[test]
    fn eigenvalue_examples() {
        let law = air();
        let rest = st(1.0, 0.0);
        assert!((law.lambda1(&rest).unwrap() + 1.183216).abs() < 1e-6);
        assert!((law.lambda2(&rest).unwrap() - 1.183216).abs() < 1e-6);
        assert!((law.lambda1(&st(2.0, 1.0)).unwrap() + 0.859158).abs() < 1e-6);
        let u = st(3.3, 0.0);
        assert_eq!(law.lambda1(&u).unwrap(), -law.lambda2(&u).unwrap());
    }

    #[test]
    fn subsonic_examples() {
        let law = air();
        assert!(law.is_subsonic(&st(1.0, 0.0)).unwrap());
        assert!(law.is_subsonic(&st(2.0, 1.0)).unwrap());
        assert!(!law.is_subsonic(&st(1.0, 2.0)).unwrap());
    }

    #[test]
    fn momentum_flux_examples() {
        let law = air();
        assert_eq!(law.momentum_flux(&st(1.0, 0.0)).unwrap(), 1.0);
        assert!((law.momentum_flux(&st(2.0, 1.0)).unwrap() - 3.139016).abs() < 1e-5);
        assert!((law.momentum_flux(&st(2.2, 1.387882)).unwrap() - 3.891278).abs() < 1e-5);
    }

    #[test]
    fn domain_errors() {
        let law = air();
        assert!(matches!(law.pressure(0.0), Err(Error::Domain { .. })));
        assert!(matches!(law.sound_speed(-1.0), Err(Error::Domain { .. })));
        assert!(law.lambda1(&State { rho: 0.0, q: 1.0 }).is_err());
        assert!(law.momentum_flux(&State { rho: -2.0, q: 1.0 }).is_err());
        assert!(State::new(0.0, 1.0).is_err());
        assert!(GasLaw::new(0.9, 1.0, 1.0).is_err());
        assert!(GasLaw::new(1.4, 0.0, 1.0).is_err());
        assert!(GasLaw::new(1.4, 1.0, -1.0).is_err());
    }

    #[test]
    fn sonic_density_is_flux_minimiser() {
        let law = GasLaw::<f64>::new(1.67, 2.0, 0.7).unwrap();
        let q = 1.3;
        let rs = law.sonic_density(q);
        let u = State { rho: rs, q };
        assert!(law.l1(&u).abs().min(law.l2(&u).abs()) < 1e-12);
        let h = 1e-4;
        assert!(law.flux(&State { rho: rs - h, q }) > law.flux(&u));
        assert!(law.flux(&State { rho: rs + h, q }) > law.flux(&u));
    }

    #[test]
    fn works_in_single_precision() {
        let law = GasLaw::<f32>::default();
        assert!((law.sound_speed(2.0).unwrap() - 1.359158).abs() < 1e-5);
    }
}

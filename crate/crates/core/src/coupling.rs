//! Junction conditions `Φ(a_l, u_l; a_r, u_r) = 0` and the stationary
//! transmission map they induce.
//!
//! All four kinds share the mass condition `a_l·q_l = a_r·q_r`; they differ in
//! the second component:
//!
//! | kind | second component |
//! |------|------------------|
//! | `L`  | `a_r·P(u_r) − a_l·P(u_l)` |
//! | `p`  | `p(ρ_r) − p(ρ_l)` |
//! | `P`  | `P(u_r) − P(u_l)` |
//! | `S`  | `a_r·P(u_r) − a_l·P(u_l) − ∫_{a_l}^{a_r} p(R(α)) dα` |
//!
//! where `R` follows the section ODE integrated by [`integrate_rq`].

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::eos::{check_density, GasLaw, State};
use crate::error::{Error, Result};
use crate::ode::{Step, Stepper, MAX_STEPS};
use crate::roots::{self, Bracket};
use crate::scalar::Real;

/// Default relative tolerance of the section ODE.
pub const DEFAULT_TOL: f64 = 1e-8;

/// The section ODE aborts once its denominator drops below this fraction of
/// its initial value.
const SONIC_GUARD: f64 = 1e-12;

/// Above this squared Mach number a forward integration switches to `a(R)`
/// as the unknown, which stays regular up to the sonic line.
const INVERSE_FORM_MACH2: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CouplingKind {
    /// `L`: conservation of linear momentum.
    #[serde(rename = "L")]
    LinearMomentum,
    /// `p`: equal pressure.
    #[serde(rename = "p")]
    EqualPressure,
    /// `P`: equal dynamic pressure.
    #[serde(rename = "P")]
    DynamicPressure,
    /// `S`: limit of smoothly varying sections.
    #[serde(rename = "S")]
    SmoothSection,
}

impl CouplingKind {
    pub const ALL: [CouplingKind; 4] = [
        CouplingKind::LinearMomentum,
        CouplingKind::EqualPressure,
        CouplingKind::DynamicPressure,
        CouplingKind::SmoothSection,
    ];

    pub fn letter(self) -> char {
        match self {
            CouplingKind::LinearMomentum => 'L',
            CouplingKind::EqualPressure => 'p',
            CouplingKind::DynamicPressure => 'P',
            CouplingKind::SmoothSection => 'S',
        }
    }
}

impl fmt::Display for CouplingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

impl FromStr for CouplingKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "L" => Ok(CouplingKind::LinearMomentum),
            "p" => Ok(CouplingKind::EqualPressure),
            "P" => Ok(CouplingKind::DynamicPressure),
            "S" => Ok(CouplingKind::SmoothSection),
            other => Err(Error::InvalidArgument(format!(
                "unknown coupling kind {other:?} (expected L, p, P or S)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Junction<T> {
    pub a_l: T,
    pub a_r: T,
    pub kind: CouplingKind,
}

impl<T: Real> Junction<T> {
    pub fn new(a_l: T, a_r: T, kind: CouplingKind) -> Result<Self> {
        check_section(a_l)?;
        check_section(a_r)?;
        Ok(Self { a_l, a_r, kind })
    }

    /// The same junction seen from the other side.
    pub fn mirrored(&self) -> Self {
        Self {
            a_l: self.a_r,
            a_r: self.a_l,
            kind: self.kind,
        }
    }
}

fn check_section<T: Real>(a: T) -> Result<()> {
    if a > T::zero() && a.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain {
            what: "section",
            value: a.f64(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OdeSample<T> {
    pub a: T,
    pub r: T,
    pub q: T,
}

/// Discrete solution of the section ODE from `a_l` to the target section.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OdePath<T> {
    pub samples: Vec<OdeSample<T>>,
    /// `∫ p(R(α)) dα` over the whole path.
    pub pressure_integral: T,
}

impl<T: Real> OdePath<T> {
    pub fn end(&self) -> &OdeSample<T> {
        self.samples
            .last()
            .expect("path has at least its initial sample")
    }
}

/// Local error control runs this much tighter than the requested accuracy,
/// so that results computed along different routes agree to that accuracy.
const STEP_SAFETY: f64 = 1e-2;

/// Validates a requested accuracy and returns the step-control tolerance.
pub(crate) fn check_tol<T: Real>(tol: T) -> Result<T> {
    if tol > T::zero() && tol.is_finite() {
        Ok((tol * T::lit(STEP_SAFETY)).max(T::tolerance(0.0)))
    } else {
        Err(Error::InvalidArgument(format!(
            "tolerance must be positive, got {tol}"
        )))
    }
}

/// `a²·p′(R)·R² − m²` with `m = a_l·q_l`.
fn denominator<T: Real>(law: &GasLaw<T>, a: T, r: T, m2: T) -> T {
    a * a * law.dp(r) * r * r - m2
}

/// Solves `dR/da = (R/a)·m²/(a²p′(R)R² − m²)`, `R(a_l) = ρ_l`, together with
/// `∫ p(R) da`, and samples `Q(a) = m/a` along the way.
pub fn integrate_rq<T: Real>(
    law: &GasLaw<T>,
    a_l: T,
    u_l: &State<T>,
    a_target: T,
    tol: T,
) -> Result<OdePath<T>> {
    check_section(a_l)?;
    check_section(a_target)?;
    let tol = check_tol(tol)?;
    law.require_subsonic(u_l)?;
    let m = a_l * u_l.q;
    let mut samples = vec![OdeSample {
        a: a_l,
        r: u_l.rho,
        q: u_l.q,
    }];
    if m == T::zero() {
        if a_target != a_l {
            samples.push(OdeSample {
                a: a_target,
                r: u_l.rho,
                q: T::zero(),
            });
        }
        let integral = (a_target - a_l) * law.p(u_l.rho);
        return Ok(OdePath {
            samples,
            pressure_integral: integral,
        });
    }
    let m2 = m * m;
    let d0 = denominator(law, a_l, u_l.rho, m2);
    let rhs = section_rhs(law, m2, d0);
    let end = Stepper::new(tol).integrate(rhs, a_l, [u_l.rho, T::zero()], a_target, |a, y| {
        samples.push(OdeSample {
            a,
            r: y[0],
            q: m / a,
        });
    })?;
    Ok(OdePath {
        samples,
        pressure_integral: end[1],
    })
}

fn section_rhs<T: Real>(
    law: &GasLaw<T>,
    m2: T,
    d0: T,
) -> impl FnMut(T, &[T; 2]) -> Result<[T; 2]> + '_ {
    let guard = d0 * T::lit(SONIC_GUARD);
    move |a: T, y: &[T; 2]| {
        let r = y[0];
        if !(r > T::zero()) {
            return Err(Error::Singularity {
                a: a.f64(),
                r: r.f64(),
            });
        }
        let d = denominator(law, a, r, m2);
        if !(d > guard) {
            return Err(Error::Singularity {
                a: a.f64(),
                r: r.f64(),
            });
        }
        Ok([r / a * m2 / d, law.p(r)])
    }
}

/// `(R(a_target), ∫_{a_l}^{a_target} p(R) dα)`.
///
/// Accepts a left state on the sonic line when integrating towards larger
/// sections, where the solution leaves the singularity immediately.
pub(crate) fn rq_endpoint<T: Real>(
    law: &GasLaw<T>,
    a_l: T,
    u_l: &State<T>,
    a_target: T,
    tol: T,
) -> Result<(T, T)> {
    if a_target == a_l {
        return Ok((u_l.rho, T::zero()));
    }
    let m = a_l * u_l.q;
    if m == T::zero() {
        return Ok((u_l.rho, (a_target - a_l) * law.p(u_l.rho)));
    }
    let m2 = m * m;
    let rest = a_l * a_l * law.dp(u_l.rho) * u_l.rho * u_l.rho;
    let d0 = rest - m2;
    let forward = a_target > a_l;
    // States on the sonic line, up to round-off, may start a forward run.
    let sonic_slack = T::tolerance(1e-12) * rest;
    if (forward && d0 < -sonic_slack) || (!forward && d0 <= T::zero()) {
        return Err(Error::NotSubsonic {
            rho: u_l.rho.f64(),
            q: u_l.q.f64(),
        });
    }
    if forward && m2 >= T::lit(INVERSE_FORM_MACH2) * rest {
        return inverse_endpoint(law, a_l, u_l.rho, a_target, m2, tol);
    }
    let end = Stepper::new(tol).integrate(
        section_rhs(law, m2, d0),
        a_l,
        [u_l.rho, T::zero()],
        a_target,
        |_, _| {},
    )?;
    Ok((end[0], end[1]))
}

/// Integrates `da/dR = a·D/(R·m²)` and `dI/dR = p(R)·da/dR` from `R = ρ_l`
/// until `a` reaches `a_target`.
fn inverse_endpoint<T: Real>(
    law: &GasLaw<T>,
    a_l: T,
    rho_l: T,
    a_target: T,
    m2: T,
    tol: T,
) -> Result<(T, T)> {
    let mut rhs = |r: T, y: &[T; 2]| -> Result<[T; 2]> {
        let a = y[0];
        if !(r > T::zero()) || !(a > T::zero()) {
            return Err(Error::Singularity {
                a: a.f64(),
                r: r.f64(),
            });
        }
        let da = a * denominator(law, a, r, m2) / (r * m2);
        Ok([da, law.p(r) * da])
    };
    let stepper = Stepper::new(tol);
    let mut r = rho_l;
    let mut y = [a_l, T::zero()];
    let mut h = rho_l * T::lit(1e-3);
    for _ in 0..MAX_STEPS {
        match stepper.try_step(&mut rhs, r, &y, h)? {
            Step::Accepted { y: next, next_h } => {
                if next[0] >= a_target {
                    let start = y;
                    let f = |theta: T| match stepper.doubled(&mut rhs, r, &start, theta) {
                        Ok((v, _)) => v[0] - a_target,
                        Err(_) => T::nan(),
                    };
                    let bracket = Bracket {
                        lo: T::zero(),
                        hi: h,
                        f_lo: start[0] - a_target,
                        f_hi: next[0] - a_target,
                    };
                    let theta = roots::brent("section ODE endpoint", f, bracket, T::zero())?;
                    let (end, _) = stepper.doubled(&mut rhs, r, &start, theta)?;
                    return Ok((r + theta, end[1]));
                }
                r = r + h;
                y = next;
                h = next_h;
            }
            Step::Rejected { next_h } => h = next_h,
        }
        if !(h > T::zero()) || !r.is_finite() {
            break;
        }
    }
    Err(Error::NoConvergence {
        what: "section ODE in inverse form",
        iterations: MAX_STEPS,
    })
}

/// `∫_{a_l}^{a_r} p(R(α; ρ_l, q_l)) dα`.
pub fn s_integral<T: Real>(law: &GasLaw<T>, a_l: T, u_l: &State<T>, a_r: T, tol: T) -> Result<T> {
    check_section(a_l)?;
    check_section(a_r)?;
    let tol = check_tol(tol)?;
    check_density(u_l.rho)?;
    Ok(rq_endpoint(law, a_l, u_l, a_r, tol)?.1)
}

/// Unscaled `(Φ₁, Φ₂)`.
pub fn phi_residual<T: Real>(
    law: &GasLaw<T>,
    junction: &Junction<T>,
    u_l: &State<T>,
    u_r: &State<T>,
) -> Result<[T; 2]> {
    phi_residual_with_tol(law, junction, u_l, u_r, T::tolerance(DEFAULT_TOL))
}

pub fn phi_residual_with_tol<T: Real>(
    law: &GasLaw<T>,
    junction: &Junction<T>,
    u_l: &State<T>,
    u_r: &State<T>,
    tol: T,
) -> Result<[T; 2]> {
    Ok(residual_parts(law, junction, u_l, u_r, tol)?.0)
}

/// Residual scaled per component: mass by `max(a_l|q_l|, a_r|q_r|, 1)`, the
/// second component by the largest flux-like term involved (at least 1).
pub fn phi_residual_scaled<T: Real>(
    law: &GasLaw<T>,
    junction: &Junction<T>,
    u_l: &State<T>,
    u_r: &State<T>,
    tol: T,
) -> Result<[T; 2]> {
    let ([r1, r2], scale2) = residual_parts(law, junction, u_l, u_r, tol)?;
    let Junction { a_l, a_r, .. } = *junction;
    let scale1 = (a_l * u_l.q.abs()).max(a_r * u_r.q.abs()).max(T::one());
    Ok([r1 / scale1, r2 / scale2.max(T::one())])
}

fn residual_parts<T: Real>(
    law: &GasLaw<T>,
    junction: &Junction<T>,
    u_l: &State<T>,
    u_r: &State<T>,
    tol: T,
) -> Result<([T; 2], T)> {
    check_density(u_l.rho)?;
    check_density(u_r.rho)?;
    let Junction { a_l, a_r, kind } = *junction;
    let mass = a_l * u_l.q - a_r * u_r.q;
    let (second, scale) = match kind {
        CouplingKind::LinearMomentum => {
            let (left, right) = (a_l * law.flux(u_l), a_r * law.flux(u_r));
            (right - left, left.max(right))
        }
        CouplingKind::EqualPressure => {
            let (left, right) = (law.p(u_l.rho), law.p(u_r.rho));
            (right - left, left.max(right))
        }
        CouplingKind::DynamicPressure => {
            let (left, right) = (law.flux(u_l), law.flux(u_r));
            (right - left, left.max(right))
        }
        CouplingKind::SmoothSection => {
            let (left, right) = (a_l * law.flux(u_l), a_r * law.flux(u_r));
            let integral = rq_endpoint(law, a_l, u_l, a_r, check_tol(tol)?)?.1;
            (right - left - integral, left.max(right).max(integral.abs()))
        }
    };
    Ok(([mass, second], scale))
}

/// The stationary partner `u_r = T(u_l; a_l, a_r)`.
pub fn transmit<T: Real>(
    law: &GasLaw<T>,
    junction: &Junction<T>,
    u_l: &State<T>,
) -> Result<State<T>> {
    transmit_with_tol(law, junction, u_l, T::tolerance(DEFAULT_TOL))
}

pub fn transmit_with_tol<T: Real>(
    law: &GasLaw<T>,
    junction: &Junction<T>,
    u_l: &State<T>,
    tol: T,
) -> Result<State<T>> {
    let tol = check_tol(tol)?;
    law.require_subsonic(u_l)?;
    let Junction { a_l, a_r, kind } = *junction;
    let fail = |reason: String| Error::Transmission {
        kind: kind.letter(),
        reason,
    };
    if a_l == a_r {
        return Ok(*u_l);
    }
    let q_r = a_l * u_l.q / a_r;
    let rho_r = match kind {
        CouplingKind::EqualPressure => u_l.rho,
        CouplingKind::DynamicPressure => flux_root(law, q_r, law.flux(u_l)).map_err(fail)?,
        CouplingKind::LinearMomentum => {
            flux_root(law, q_r, a_l * law.flux(u_l) / a_r).map_err(fail)?
        }
        CouplingKind::SmoothSection => match rq_endpoint(law, a_l, u_l, a_r, tol) {
            Ok((r, _)) => r,
            Err(e) => return Err(fail(format!("section ODE failed: {e}"))),
        },
    };
    let u_r = State { rho: rho_r, q: q_r };
    if !law.subsonic(&u_r) {
        return Err(fail(format!(
            "partner state (rho={rho_r}, q={q_r}) is not subsonic"
        )));
    }
    Ok(u_r)
}

/// Subsonic solution of `P(ρ, q) = target`: the branch above the sonic
/// density, where `ρ ↦ P(ρ, q)` increases.
fn flux_root<T: Real>(law: &GasLaw<T>, q: T, target: T) -> std::result::Result<T, String> {
    let sonic = law.sonic_density(q);
    let f = |rho: T| law.flux(&State { rho, q }) - target;
    let mut g = f;
    let bracket = if sonic > T::zero() {
        let f_sonic = f(sonic);
        if f_sonic >= T::zero() {
            return Err(format!(
                "momentum flux {target} is below the sonic minimum {} at q={q}",
                f_sonic + target
            ));
        }
        roots::bracket_up("momentum flux balance", &mut g, sonic, f_sonic)
    } else {
        // Static flow: P = p(ρ) increases from zero.
        let start = law.rho_ref;
        let f_start = f(start);
        if f_start < T::zero() {
            roots::bracket_up("momentum flux balance", &mut g, start, f_start)
        } else {
            roots::bracket_down("momentum flux balance", &mut g, start, f_start)
        }
    }
    .map_err(|e| e.to_string())?;
    roots::brent("momentum flux balance", f, bracket, T::zero()).map_err(|e| e.to_string())
}

/// Determinant of `D_{u_r}Φ`; positive on the open subsonic region.
pub fn jacobian_determinant<T: Real>(
    law: &GasLaw<T>,
    junction: &Junction<T>,
    u_r: &State<T>,
) -> Result<T> {
    check_density(u_r.rho)?;
    let a_r = junction.a_r;
    let product = law.l1(u_r) * law.l2(u_r);
    Ok(match junction.kind {
        CouplingKind::LinearMomentum | CouplingKind::SmoothSection => -a_r * a_r * product,
        CouplingKind::EqualPressure => a_r * law.dp(u_r.rho),
        CouplingKind::DynamicPressure => -a_r * product,
    })
}

/// Parameters of a randomized property audit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AuditConfig {
    pub samples: usize,
    pub seed: u64,
    /// Sections are drawn uniformly from this interval.
    pub section_range: (f64, f64),
    /// Densities are drawn uniformly from this interval (units of `rho_ref`).
    pub density_range: (f64, f64),
    /// Upper bound on `|q/ρ|/c(ρ)` of the drawn states.
    pub max_mach: f64,
    pub tol: f64,
}

impl Default for AuditConfig {
    fn default() -> Self {
        Self {
            samples: 1000,
            seed: 0x5eed,
            section_range: (0.7, 1.4),
            density_range: (0.3, 4.0),
            max_mach: 0.4,
            tol: 1e-10,
        }
    }
}

/// Extremes of one property's violation over the audit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PropertyCheck {
    pub checked: usize,
    pub max_violation: f64,
    pub min_violation: f64,
}

impl PropertyCheck {
    fn new() -> Self {
        Self {
            checked: 0,
            max_violation: 0.0,
            min_violation: f64::INFINITY,
        }
    }

    fn record(&mut self, violation: f64) {
        self.checked += 1;
        self.max_violation = self.max_violation.max(violation);
        self.min_violation = self.min_violation.min(violation);
    }

    pub fn holds(&self, tol: f64) -> bool {
        self.checked > 0 && self.max_violation <= tol
    }

    /// Every sample violated the property by more than `tol`.
    pub fn always_violated(&self, tol: f64) -> bool {
        self.checked > 0 && self.min_violation > tol
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyReport {
    pub kind: CouplingKind,
    /// Equal sections transmit every state unchanged.
    pub no_junction: PropertyCheck,
    /// Transmitting the reflected partner back recovers the reflected state.
    pub symmetry: PropertyCheck,
    /// Transmitting through an intermediate section changes nothing.
    pub consistency: PropertyCheck,
    /// Relative pressure jump of static states.
    pub hydrostatic: PropertyCheck,
    pub min_determinant: f64,
    /// Draws discarded because some transmission left the subsonic region.
    pub skipped: usize,
}

/// Distance between states in units of density and of `ρ·c(ρ)`.
fn state_distance<T: Real>(law: &GasLaw<T>, a: &State<T>, b: &State<T>) -> f64 {
    let d_rho = ((a.rho - b.rho) / b.rho).abs();
    let d_q = ((a.q - b.q) / (b.rho * law.c(b.rho))).abs();
    d_rho.max(d_q).f64()
}

/// Randomized audit of the no-junction, symmetry, consistency and
/// hydrostatic properties of one coupling kind.
pub fn audit_properties<T: Real>(
    law: &GasLaw<T>,
    kind: CouplingKind,
    config: &AuditConfig,
) -> Result<PropertyReport> {
    if config.samples == 0 {
        return Err(Error::InvalidArgument(
            "audit needs at least one sample".into(),
        ));
    }
    let (s_lo, s_hi) = config.section_range;
    let (d_lo, d_hi) = config.density_range;
    if !(s_lo > 0.0
        && s_hi >= s_lo
        && d_lo > 0.0
        && d_hi >= d_lo
        && config.max_mach > 0.0
        && config.max_mach < 1.0)
    {
        return Err(Error::InvalidArgument(format!(
            "invalid audit ranges {config:?}"
        )));
    }
    let tol = T::tolerance(config.tol);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut report = PropertyReport {
        kind,
        no_junction: PropertyCheck::new(),
        symmetry: PropertyCheck::new(),
        consistency: PropertyCheck::new(),
        hydrostatic: PropertyCheck::new(),
        min_determinant: f64::INFINITY,
        skipped: 0,
    };
    let max_attempts = config.samples.saturating_mul(20);
    let mut accepted = 0;
    let mut attempts = 0;
    while accepted < config.samples && attempts < max_attempts {
        attempts += 1;
        let a_l = T::lit(rng.gen_range(s_lo..=s_hi));
        let a_m = T::lit(rng.gen_range(s_lo..=s_hi));
        let a_r = T::lit(rng.gen_range(s_lo..=s_hi));
        let rho = T::lit(rng.gen_range(d_lo..=d_hi)) * law.rho_ref;
        let mach = T::lit(rng.gen_range(-config.max_mach..=config.max_mach));
        let rho_static = T::lit(rng.gen_range(d_lo..=d_hi)) * law.rho_ref;
        let u_l = State {
            rho,
            q: mach * rho * law.c(rho),
        };

        let sample = (|| -> Result<[f64; 5]> {
            let same = transmit_with_tol(law, &Junction::new(a_l, a_l, kind)?, &u_l, tol)?;
            let forward = Junction::new(a_l, a_r, kind)?;
            let u_r = transmit_with_tol(law, &forward, &u_l, tol)?;
            let back = transmit_with_tol(law, &forward.mirrored(), &u_r.reflected(), tol)?;
            let u_m = transmit_with_tol(law, &Junction::new(a_l, a_m, kind)?, &u_l, tol)?;
            let composed = transmit_with_tol(law, &Junction::new(a_m, a_r, kind)?, &u_m, tol)?;
            let static_partner = transmit_with_tol(
                law,
                &forward,
                &State {
                    rho: rho_static,
                    q: T::zero(),
                },
                tol,
            )?;
            let p_static = law.p(rho_static);
            Ok([
                state_distance(law, &same, &u_l),
                state_distance(law, &back, &u_l.reflected()),
                state_distance(law, &composed, &u_r),
                ((law.p(static_partner.rho) - p_static) / p_static)
                    .abs()
                    .f64(),
                jacobian_determinant(law, &forward, &u_r)?.f64(),
            ])
        })();
        match sample {
            Ok([identity, symmetry, consistency, hydrostatic, det]) => {
                accepted += 1;
                report.no_junction.record(identity);
                report.symmetry.record(symmetry);
                report.consistency.record(consistency);
                report.hydrostatic.record(hydrostatic);
                report.min_determinant = report.min_determinant.min(det);
            }
            Err(Error::Transmission { .. }) => report.skipped += 1,
            Err(e) => return Err(e),
        }
    }
    Ok(report)
}

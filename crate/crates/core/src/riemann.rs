//! Exact Riemann solvers: the classical one for a single pipe and the
//! junction solver for each coupling kind, with existence certificates.
//!
//! A junction solution consists of a 1-wave in the left pipe connecting `ū_l`
//! to the trace `u₋ = u(t, 0−)`, a stationary jump `u₋ → u₊` satisfying the
//! coupling condition, and a 2-wave in the right pipe connecting `u₊ = u(t,
//! 0+)` to `ū_r`. Both traces are subsonic, which confines the waves to their
//! own pipe.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::coupling::{check_tol, rq_endpoint, CouplingKind, Junction, DEFAULT_TOL};
use crate::eos::{check_density, GasLaw, State};
use crate::error::{Error, Result};
use crate::lax::{sonic_bounds, Family, LaxCurve, ReversedInverse, Side, SonicBounds};
use crate::roots::{self, Bracket};
use crate::scalar::Real;

/// Waves whose density jump is below this fraction of the larger density are
/// dropped from the fan.
const NEGLIGIBLE_WAVE: f64 = 1e-12;

/// Existence inequalities are accepted when violated by at most this much
/// (relative), and flagged as boundary cases when satisfied by less.
const CNS_SLACK: f64 = 1e-10;

/// Relative slack when a transmitted momentum lands a hair outside the range
/// of the reversed 2-curve on its subsonic window.
const INVERSE_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiemannProblem<T> {
    pub junction: Junction<T>,
    pub u_bar_l: State<T>,
    pub u_bar_r: State<T>,
}

impl<T: Real> RiemannProblem<T> {
    /// Validates that both data are subsonic.
    pub fn new(
        law: &GasLaw<T>,
        junction: Junction<T>,
        u_bar_l: State<T>,
        u_bar_r: State<T>,
    ) -> Result<Self> {
        law.require_subsonic(&u_bar_l)?;
        law.require_subsonic(&u_bar_r)?;
        Ok(Self {
            junction,
            u_bar_l,
            u_bar_r,
        })
    }

    /// The problem seen in a mirror: sections swapped, data swapped and
    /// reflected.
    pub fn mirrored(&self) -> Self {
        Self {
            junction: self.junction.mirrored(),
            u_bar_l: self.u_bar_r.reflected(),
            u_bar_r: self.u_bar_l.reflected(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WaveKind {
    Shock,
    Rarefaction,
}

impl fmt::Display for WaveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WaveKind::Shock => "shock",
            WaveKind::Rarefaction => "rarefaction",
        })
    }
}

/// A single shock or centred rarefaction. For shocks both speeds coincide.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Wave<T> {
    pub family: Family,
    pub kind: WaveKind,
    pub u_left: State<T>,
    pub u_right: State<T>,
    pub speed_left: T,
    pub speed_right: T,
}

impl<T: Real> Wave<T> {
    /// Wave of `family` from `u_left` to `u_right`, or `None` when the jump
    /// is negligible. The states must lie on a common Lax curve.
    fn between(
        law: &GasLaw<T>,
        family: Family,
        u_left: State<T>,
        u_right: State<T>,
    ) -> Option<Self> {
        let jump = (u_right.rho - u_left.rho).abs();
        if jump <= T::lit(NEGLIGIBLE_WAVE) * u_left.rho.max(u_right.rho) {
            return None;
        }
        let lambda = |u: &State<T>| match family {
            Family::One => law.l1(u),
            Family::Two => law.l2(u),
        };
        // 1-shocks compress left to right, 2-shocks expand.
        let compressive = match family {
            Family::One => u_right.rho > u_left.rho,
            Family::Two => u_right.rho < u_left.rho,
        };
        let (kind, speed_left, speed_right) = if compressive {
            let s = (u_right.q - u_left.q) / (u_right.rho - u_left.rho);
            (WaveKind::Shock, s, s)
        } else {
            (WaveKind::Rarefaction, lambda(&u_left), lambda(&u_right))
        };
        Some(Self {
            family,
            kind,
            u_left,
            u_right,
            speed_left,
            speed_right,
        })
    }

    /// State inside a rarefaction at `ξ = x/t`, `speed_left ≤ ξ ≤ speed_right`.
    fn fan_state(&self, law: &GasLaw<T>, xi: T) -> State<T> {
        let curve = match self.family {
            Family::One => LaxCurve::forward_1(law, &self.u_left),
            Family::Two => LaxCurve::forward_2(law, &self.u_left),
        };
        let lambda = |u: &State<T>| match self.family {
            Family::One => law.l1(u),
            Family::Two => law.l2(u),
        };
        let f = |rho: T| lambda(&curve.state(rho)) - xi;
        let (lo, hi) = (self.u_left.rho, self.u_right.rho);
        let (f_lo, f_hi) = (f(lo), f(hi));
        let bracket = Bracket { lo, hi, f_lo, f_hi };
        match roots::brent("rarefaction fan", f, bracket, T::zero()) {
            Ok(rho) => curve.state(rho),
            // Round-off at the fan edges: take the nearer edge.
            Err(_) if f_lo.abs() <= f_hi.abs() => self.u_left,
            Err(_) => self.u_right,
        }
    }
}

/// Self-similar solution: left wave, stationary jump at `x = 0`, right wave.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveFan<T> {
    pub law: GasLaw<T>,
    pub left_state: State<T>,
    pub right_state: State<T>,
    pub left_wave: Option<Wave<T>>,
    pub right_wave: Option<Wave<T>>,
    /// `u(t, 0−)`; equals `trace_plus` for the classical solver.
    pub trace_minus: State<T>,
    /// `u(t, 0+)`.
    pub trace_plus: State<T>,
    /// Whether the middle states are separated by a junction at `x = 0`.
    pub at_junction: bool,
}

impl<T: Real> WaveFan<T> {
    fn assemble(
        law: &GasLaw<T>,
        left_state: State<T>,
        trace_minus: State<T>,
        trace_plus: State<T>,
        right_state: State<T>,
        at_junction: bool,
    ) -> Self {
        Self {
            law: *law,
            left_state,
            right_state,
            left_wave: Wave::between(law, Family::One, left_state, trace_minus),
            right_wave: Wave::between(law, Family::Two, trace_plus, right_state),
            trace_minus,
            trace_plus,
            at_junction,
        }
    }

    pub fn waves(&self) -> impl Iterator<Item = &Wave<T>> {
        self.left_wave.iter().chain(self.right_wave.iter())
    }

    pub fn is_stationary(&self) -> bool {
        self.left_wave.is_none() && self.right_wave.is_none()
    }

    /// The solution at `(t, x)`; `x = 0` returns the `0+` trace.
    pub fn sample(&self, t: T, x: T) -> Result<State<T>> {
        if !(t > T::zero()) || !t.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "sampling time must be positive, got {t}"
            )));
        }
        if !x.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "sampling position must be finite, got {x}"
            )));
        }
        Ok(self.sample_xi(x / t))
    }

    /// The solution at `ξ = x/t`.
    pub fn sample_xi(&self, xi: T) -> State<T> {
        if let Some(w) = &self.left_wave {
            if xi < w.speed_left {
                return self.left_state;
            }
            if w.kind == WaveKind::Rarefaction && xi <= w.speed_right {
                return w.fan_state(&self.law, xi);
            }
        }
        if let Some(w) = &self.right_wave {
            if xi > w.speed_right || (w.kind == WaveKind::Shock && xi == w.speed_right) {
                return self.right_state;
            }
            if w.kind == WaveKind::Rarefaction && xi >= w.speed_left {
                return w.fan_state(&self.law, xi);
            }
        }
        if xi < T::zero() {
            self.trace_minus
        } else {
            self.trace_plus
        }
    }

    /// Largest characteristic or wave speed in magnitude.
    pub fn max_speed(&self) -> T {
        let mut s = T::zero();
        for u in [
            self.left_state,
            self.trace_minus,
            self.trace_plus,
            self.right_state,
        ] {
            s = s.max(self.law.l1(&u).abs()).max(self.law.l2(&u).abs());
        }
        for w in self.waves() {
            s = s.max(w.speed_left.abs()).max(w.speed_right.abs());
        }
        s
    }
}

/// Solves the Riemann problem on a single pipe: intersects `L₁(·; u_l)` with
/// `L₂⁻(·; u_r)`.
pub fn solve_classical<T: Real>(
    law: &GasLaw<T>,
    u_l: &State<T>,
    u_r: &State<T>,
) -> Result<WaveFan<T>> {
    check_density(u_l.rho)?;
    check_density(u_r.rho)?;
    if u_l == u_r {
        return Ok(WaveFan::assemble(law, *u_l, *u_l, *u_l, *u_r, false));
    }
    if !law.is_isothermal() {
        // Velocities reachable by the rarefaction branches as ρ → 0.
        let h = T::lit(2.0) / (law.gamma - T::one());
        let reach_l = u_l.velocity() + h * law.c(u_l.rho);
        let reach_r = u_r.velocity() - h * law.c(u_r.rho);
        if reach_l - reach_r <= T::zero() {
            return Err(Error::Vacuum);
        }
    }
    let left = LaxCurve::forward_1(law, u_l);
    let right = LaxCurve::reversed_2(law, u_r);
    // Velocity mismatch, strictly decreasing in ρ.
    let f = |rho: T| (left.at(rho) - right.at(rho)) / rho;
    let x0 = (u_l.rho * u_r.rho).sqrt();
    let f0 = f(x0);
    let rho = if f0 == T::zero() {
        x0
    } else {
        let mut g = f;
        let bracket = if f0 > T::zero() {
            roots::bracket_up("classical middle state", &mut g, x0, f0)
        } else {
            roots::bracket_down("classical middle state", &mut g, x0, f0)
        }
        .map_err(|_| Error::Vacuum)?;
        roots::brent("classical middle state", f, bracket, T::zero())?
    };
    let middle = State {
        rho,
        q: left.at(rho),
    };
    Ok(WaveFan::assemble(law, *u_l, middle, middle, *u_r, false))
}

/// Why a junction problem has no subsonic solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Refusal {
    /// `(p)`, `(P)`: `fu_l(ū_l) > fu_r(ū_r)`.
    SonicUpper,
    /// `(p)`, `(P)`: `fd_l(ū_l) < fd_r(ū_r)`.
    SonicLower,
    /// `(L)`: `a_l < a_r` and `fd_l(ū_l) < fd_r(ū_r)`.
    ExpansionSonicLower,
    /// `(L)`: `a_l > a_r` and `fu_l(ū_l) > fu_r(ū_r)`.
    ContractionSonicUpper,
    /// `(S)`: `a_l < a_r` and `fu_l(ū_l) > fu_r(ū_r)`.
    ExpansionSonicUpper,
    /// `(S)`: `a_l > a_r` and `fd_l(ū_l) < fd_r(ū_r)` (the mirror image of
    /// [`Refusal::ExpansionSonicUpper`]).
    ContractionSonicLower,
    /// `(L)`, `(P)`: no left trace can carry a momentum the right pipe
    /// accepts from above; `l′` is undefined.
    EmptyLowerSet,
    /// `(L)`, `(P)`: as above from below; `l″` is undefined.
    EmptyUpperSet,
    /// The existence inequality at `l′` fails.
    LowerCondition,
    /// The existence inequality at `l″` fails.
    UpperCondition,
}

impl Refusal {
    pub fn description(self) -> &'static str {
        match self {
            Refusal::SonicUpper => "left upper sonic bound exceeds the right one",
            Refusal::SonicLower => "left lower sonic bound is below the right one",
            Refusal::ExpansionSonicLower => {
                "expansion with left lower sonic bound below the right one"
            }
            Refusal::ContractionSonicUpper => {
                "contraction with left upper sonic bound above the right one"
            }
            Refusal::ExpansionSonicUpper => {
                "expansion with left upper sonic bound above the right one"
            }
            Refusal::ContractionSonicLower => {
                "contraction with left lower sonic bound below the right one"
            }
            Refusal::EmptyLowerSet => "lower bound set is empty",
            Refusal::EmptyUpperSet => "upper bound set is empty",
            Refusal::LowerCondition => "existence inequality at the lower bound fails",
            Refusal::UpperCondition => "existence inequality at the upper bound fails",
        }
    }

    /// Refusals implied directly by the ordering of sonic bounds.
    pub fn is_sonic_ordering(self) -> bool {
        !matches!(
            self,
            Refusal::EmptyLowerSet
                | Refusal::EmptyUpperSet
                | Refusal::LowerCondition
                | Refusal::UpperCondition
        )
    }
}

impl fmt::Display for Refusal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.description())
    }
}

/// Sonic bounds of both data and the density window `[l′, l″]`.
///
/// For `(S)` the window lives on the right trace density. When `a_l > a_r` it
/// is computed on the mirrored problem and so refers to the left trace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JunctionBounds<T> {
    pub left: SonicBounds<T>,
    pub right: SonicBounds<T>,
    pub l_prime: Option<T>,
    pub l_double_prime: Option<T>,
    /// Whether the window was computed on the mirrored problem.
    pub mirrored: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Certificate<T> {
    pub kind: CouplingKind,
    pub l_prime: Option<T>,
    pub l_double_prime: Option<T>,
    /// Relative margins of the two existence inequalities; both are
    /// non-negative when a solution exists.
    pub lower_margin: Option<T>,
    pub upper_margin: Option<T>,
    pub exists: bool,
    /// An inequality holds with (near) equality, or a trace is sonic.
    pub boundary: bool,
    pub reason: Option<Refusal>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport<T> {
    pub certificate: Certificate<T>,
    pub fan: Option<WaveFan<T>>,
}

/// Everything the existence theory needs, in the orientation it is solved
/// in: `(S)` with `a_l > a_r` is handled through its mirror image.
struct Setup<T> {
    law: GasLaw<T>,
    problem: RiemannProblem<T>,
    mirrored: bool,
    left: SonicBounds<T>,
    right: SonicBounds<T>,
    l1: LaxCurve<T>,
    l2r: LaxCurve<T>,
    inverse: ReversedInverse<T>,
    ode_tol: T,
}

/// Value of the decreasing root function and the scale it is measured in.
struct Sample<T> {
    value: T,
    scale: T,
}

impl<T: Real> Setup<T> {
    fn new(law: &GasLaw<T>, problem: &RiemannProblem<T>, tol: T) -> Result<Self> {
        law.require_subsonic(&problem.u_bar_l)?;
        law.require_subsonic(&problem.u_bar_r)?;
        let j = problem.junction;
        let mirrored = j.kind == CouplingKind::SmoothSection && j.a_l > j.a_r;
        let problem = if mirrored {
            problem.mirrored()
        } else {
            *problem
        };
        let left = sonic_bounds(law, &problem.u_bar_l, Side::Left)?;
        let right = sonic_bounds(law, &problem.u_bar_r, Side::Right)?;
        Ok(Self {
            law: *law,
            problem,
            mirrored,
            left,
            right,
            l1: LaxCurve::forward_1(law, &problem.u_bar_l),
            l2r: LaxCurve::reversed_2(law, &problem.u_bar_r),
            inverse: ReversedInverse::new(law, &problem.u_bar_r, &right),
            ode_tol: check_tol(tol)?,
        })
    }

    fn kind(&self) -> CouplingKind {
        self.problem.junction.kind
    }

    fn sections(&self) -> (T, T) {
        (self.problem.junction.a_l, self.problem.junction.a_r)
    }

    /// Refusal implied by the ordering of sonic bounds alone.
    fn sonic_ordering(&self) -> Option<Refusal> {
        let (a_l, a_r) = self.sections();
        let upper = self.left.fu > self.right.fu;
        let lower = self.left.fd < self.right.fd;
        match self.kind() {
            CouplingKind::EqualPressure | CouplingKind::DynamicPressure => {
                if upper {
                    Some(Refusal::SonicUpper)
                } else if lower {
                    Some(Refusal::SonicLower)
                } else {
                    None
                }
            }
            CouplingKind::LinearMomentum => {
                if a_l < a_r && lower {
                    Some(Refusal::ExpansionSonicLower)
                } else if a_l > a_r && upper {
                    Some(Refusal::ContractionSonicUpper)
                } else {
                    None
                }
            }
            CouplingKind::SmoothSection => match a_l < a_r && upper {
                true if self.mirrored => Some(Refusal::ContractionSonicLower),
                true => Some(Refusal::ExpansionSonicUpper),
                false => None,
            },
        }
    }

    /// `(l′, l″)`.
    fn window(&self) -> Result<(Option<T>, Option<T>)> {
        let (fu_l, fd_l) = (self.left.fu, self.left.fd);
        match self.kind() {
            CouplingKind::EqualPressure => {
                Ok((Some(fu_l.max(self.right.fd)), Some(fd_l.min(self.right.fu))))
            }
            CouplingKind::LinearMomentum | CouplingKind::DynamicPressure => {
                let (a_l, a_r) = self.sections();
                let (q_lo, q_hi) = self.inverse.range();
                // a_l·L₁ is decreasing on [fu_l, fd_l].
                let excess = |target: T| move |rho: T| a_l * self.l1.at(rho) - a_r * target;
                let lower = {
                    let f = excess(q_hi);
                    let (f_lo, f_hi) = (f(fu_l), f(fd_l));
                    if f_lo <= T::zero() {
                        Some(fu_l)
                    } else if f_hi > T::zero() {
                        None
                    } else {
                        Some(roots::brent(
                            "lower bound l'",
                            f,
                            Bracket {
                                lo: fu_l,
                                hi: fd_l,
                                f_lo,
                                f_hi,
                            },
                            T::zero(),
                        )?)
                    }
                };
                let upper = {
                    let f = excess(q_lo);
                    let (f_lo, f_hi) = (f(fu_l), f(fd_l));
                    if f_hi >= T::zero() {
                        Some(fd_l)
                    } else if f_lo < T::zero() {
                        None
                    } else {
                        Some(roots::brent(
                            "upper bound l''",
                            f,
                            Bracket {
                                lo: fu_l,
                                hi: fd_l,
                                f_lo,
                                f_hi,
                            },
                            T::zero(),
                        )?)
                    }
                };
                Ok((lower, upper))
            }
            CouplingKind::SmoothSection => {
                Ok((Some(self.psi_rho(fu_l)?), Some(self.psi_rho(fd_l)?)))
            }
        }
    }

    /// First component of `ψ(s) = (R(a_r; s, L₁(s)), (a_l/a_r)·L₁(s))`.
    fn psi_rho(&self, s: T) -> Result<T> {
        let (a_l, a_r) = self.sections();
        let start = self.l1.state(s);
        Ok(rq_endpoint(&self.law, a_l, &start, a_r, self.ode_tol)?.0)
    }

    /// Interval searched for the root, given the window.
    fn search_interval(&self, l_prime: T, l_double_prime: T) -> (T, T) {
        match self.kind() {
            CouplingKind::SmoothSection => (self.left.fu, self.left.fd),
            _ => (l_prime, l_double_prime),
        }
    }

    /// Density of the right trace when the left trace is `(x, L₁(x))`.
    fn right_density(&self, x: T, q_plus: T) -> Result<T> {
        match self.kind() {
            CouplingKind::EqualPressure => Ok(x),
            CouplingKind::LinearMomentum | CouplingKind::DynamicPressure => {
                self.inverse.solve(q_plus, T::lit(INVERSE_SLACK))
            }
            CouplingKind::SmoothSection => self.psi_rho(x),
        }
    }

    fn traces(&self, x: T) -> Result<(State<T>, State<T>)> {
        let (a_l, a_r) = self.sections();
        let minus = self.l1.state(x);
        let q_plus = a_l * minus.q / a_r;
        let plus = State {
            rho: self.right_density(x, q_plus)?,
            q: q_plus,
        };
        Ok((minus, plus))
    }

    /// The kind's root function, decreasing in `x`; a solution exists iff it
    /// is non-negative at the lower end of the search interval and
    /// non-positive at the upper end.
    fn root_function(&self, x: T) -> Result<Sample<T>> {
        let (a_l, a_r) = self.sections();
        let law = &self.law;
        match self.kind() {
            CouplingKind::EqualPressure => {
                let (left, right) = (a_l * self.l1.at(x), a_r * self.l2r.at(x));
                Ok(Sample {
                    value: left - right,
                    scale: left.abs().max(right.abs()).max(T::one()),
                })
            }
            CouplingKind::LinearMomentum | CouplingKind::DynamicPressure => {
                let (w_l, w_r) = if self.kind() == CouplingKind::LinearMomentum {
                    (a_l, a_r)
                } else {
                    (T::one(), T::one())
                };
                let (minus, plus) = self.traces(x)?;
                let (left, right) = (w_l * law.flux(&minus), w_r * law.flux(&plus));
                Ok(Sample {
                    value: right - left,
                    scale: left.max(right).max(T::one()),
                })
            }
            CouplingKind::SmoothSection => {
                let left = a_l * self.l1.at(x);
                let right = a_r * self.l2r.at(self.psi_rho(x)?);
                Ok(Sample {
                    value: left - right,
                    scale: left.abs().max(right.abs()).max(T::one()),
                })
            }
        }
    }

    fn certify(&self) -> Result<Certificate<T>> {
        let kind = self.problem.junction.kind;
        let ordering = self.sonic_ordering();
        let refuse =
            |l_prime, l_double_prime, lower_margin, upper_margin, reason: Refusal| Certificate {
                kind,
                l_prime,
                l_double_prime,
                lower_margin,
                upper_margin,
                exists: false,
                boundary: false,
                reason: Some(ordering.unwrap_or(reason)),
            };
        let (l_prime, l_double_prime) = match self.window() {
            Ok(w) => w,
            Err(_) if ordering.is_some() => {
                return Ok(refuse(None, None, None, None, Refusal::LowerCondition))
            }
            Err(e) => return Err(e),
        };
        let (lo, hi) = match (l_prime, l_double_prime) {
            (None, _) => {
                return Ok(refuse(
                    l_prime,
                    l_double_prime,
                    None,
                    None,
                    Refusal::EmptyLowerSet,
                ))
            }
            (_, None) => {
                return Ok(refuse(
                    l_prime,
                    l_double_prime,
                    None,
                    None,
                    Refusal::EmptyUpperSet,
                ))
            }
            (Some(lo), Some(hi)) => (lo, hi),
        };
        if lo > hi {
            let reason = if self.left.fu > self.right.fu {
                Refusal::SonicUpper
            } else {
                Refusal::SonicLower
            };
            return Ok(refuse(l_prime, l_double_prime, None, None, reason));
        }
        let (x_lo, x_hi) = self.search_interval(lo, hi);
        let margins = self
            .root_function(x_lo)
            .and_then(|a| Ok((a, self.root_function(x_hi)?)));
        let (at_lo, at_hi) = match margins {
            Ok(m) => m,
            Err(_) if ordering.is_some() => {
                return Ok(refuse(
                    l_prime,
                    l_double_prime,
                    None,
                    None,
                    Refusal::LowerCondition,
                ))
            }
            Err(e) => return Err(e),
        };
        let lower = at_lo.value / at_lo.scale;
        let upper = -at_hi.value / at_hi.scale;
        let slack = T::tolerance(CNS_SLACK);
        let certificate = Certificate {
            kind,
            l_prime,
            l_double_prime,
            lower_margin: Some(lower),
            upper_margin: Some(upper),
            exists: true,
            boundary: lower <= slack || upper <= slack,
            reason: None,
        };
        if lower < -slack {
            return Ok(refuse(
                l_prime,
                l_double_prime,
                Some(lower),
                Some(upper),
                Refusal::LowerCondition,
            ));
        }
        if upper < -slack {
            return Ok(refuse(
                l_prime,
                l_double_prime,
                Some(lower),
                Some(upper),
                Refusal::UpperCondition,
            ));
        }
        Ok(certificate)
    }

    /// Root of the kind's function on the search interval; the certificate
    /// must already be positive.
    fn solve_root(&self, certificate: &Certificate<T>) -> Result<T> {
        let inconsistent = |e: Error| {
            Error::Inconsistent(format!(
                "{} root search failed despite certificate: {e}",
                self.kind()
            ))
        };
        let (lo, hi) = match (certificate.l_prime, certificate.l_double_prime) {
            (Some(lo), Some(hi)) => self.search_interval(lo, hi),
            _ => return Err(Error::Inconsistent("certificate without window".into())),
        };
        let f_lo = self.root_function(lo).map_err(inconsistent)?.value;
        let f_hi = self.root_function(hi).map_err(inconsistent)?.value;
        if f_lo <= T::zero() && f_hi >= T::zero() {
            // Both inequalities hold only within slack.
            return Ok(if f_lo.abs() <= f_hi.abs() { lo } else { hi });
        }
        if f_lo <= T::zero() {
            return Ok(lo);
        }
        if f_hi >= T::zero() {
            return Ok(hi);
        }
        let f = |x: T| self.root_function(x).map(|s| s.value).unwrap_or(T::nan());
        roots::brent(
            "junction root",
            f,
            Bracket { lo, hi, f_lo, f_hi },
            T::zero(),
        )
        .map_err(inconsistent)
    }

    fn bounds(&self) -> Result<JunctionBounds<T>> {
        let (l_prime, l_double_prime) = self.window()?;
        Ok(JunctionBounds {
            left: self.left,
            right: self.right,
            l_prime,
            l_double_prime,
            mirrored: self.mirrored,
        })
    }
}

/// Sonic bounds of the data and the window `[l′, l″]` for the junction kind.
pub fn junction_bounds<T: Real>(
    law: &GasLaw<T>,
    problem: &RiemannProblem<T>,
) -> Result<JunctionBounds<T>> {
    Setup::new(law, problem, T::tolerance(DEFAULT_TOL))?.bounds()
}

/// Decides existence of a subsonic junction solution.
pub fn check_existence<T: Real>(
    law: &GasLaw<T>,
    problem: &RiemannProblem<T>,
) -> Result<Certificate<T>> {
    check_existence_with_tol(law, problem, T::tolerance(DEFAULT_TOL))
}

pub fn check_existence_with_tol<T: Real>(
    law: &GasLaw<T>,
    problem: &RiemannProblem<T>,
    tol: T,
) -> Result<Certificate<T>> {
    Setup::new(law, problem, tol)?.certify()
}

/// Solves the junction Riemann problem, or returns the refusal certificate.
pub fn solve_junction<T: Real>(
    law: &GasLaw<T>,
    problem: &RiemannProblem<T>,
) -> Result<SolveReport<T>> {
    solve_junction_with_tol(law, problem, T::tolerance(DEFAULT_TOL))
}

pub fn solve_junction_with_tol<T: Real>(
    law: &GasLaw<T>,
    problem: &RiemannProblem<T>,
    tol: T,
) -> Result<SolveReport<T>> {
    let setup = Setup::new(law, problem, tol)?;
    let mut certificate = setup.certify()?;
    if !certificate.exists {
        return Ok(SolveReport {
            certificate,
            fan: None,
        });
    }
    let x = setup.solve_root(&certificate)?;
    let (mut minus, mut plus) = setup
        .traces(x)
        .map_err(|e| Error::Inconsistent(format!("trace construction failed: {e}")))?;
    if setup.mirrored {
        (minus, plus) = (plus.reflected(), minus.reflected());
    }
    let sonic = |u: &State<T>| {
        !law.subsonic_closed(u, T::zero())
            || law.l1(u) >= -law.c(u.rho) * T::lit(1e-9)
            || law.l2(u) <= law.c(u.rho) * T::lit(1e-9)
    };
    if sonic(&minus) || sonic(&plus) {
        certificate.boundary = true;
    }
    let fan = WaveFan::assemble(law, problem.u_bar_l, minus, plus, problem.u_bar_r, true);
    Ok(SolveReport {
        certificate,
        fan: Some(fan),
    })
}

/// Value of the kind's monotone root function at `x`, in the orientation the
/// problem is solved in (the mirrored one for `(S)` with `a_l > a_r`).
pub fn junction_root_function<T: Real>(
    law: &GasLaw<T>,
    problem: &RiemannProblem<T>,
    x: T,
) -> Result<T> {
    check_density(x)?;
    Ok(Setup::new(law, problem, T::tolerance(DEFAULT_TOL))?
        .root_function(x)?
        .value)
}

/// First component of the `(S)` curve `ψ(s)`: the density reached at `a_r`
/// by the section ODE started from `(s, L₁(s; ū_l))` at `a_l`.
pub fn smooth_section_psi<T: Real>(
    law: &GasLaw<T>,
    problem: &RiemannProblem<T>,
    s: T,
) -> Result<T> {
    check_density(s)?;
    let setup = Setup::new(law, problem, T::tolerance(DEFAULT_TOL))?;
    setup.psi_rho(s)
}

/// Rankine–Hugoniot data of a jump.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShockSpeed<T> {
    /// `[q]/[ρ]`.
    pub speed: T,
    /// `[P]/[q]`.
    pub flux_ratio: T,
    /// `|[P]/[q] − [q]/[ρ]|`.
    pub mismatch: T,
}

pub fn shock_speed<T: Real>(
    law: &GasLaw<T>,
    u_minus: &State<T>,
    u_plus: &State<T>,
) -> Result<ShockSpeed<T>> {
    check_density(u_minus.rho)?;
    check_density(u_plus.rho)?;
    if u_minus.rho == u_plus.rho {
        return Err(Error::Degenerate(
            "shock speed needs distinct densities".into(),
        ));
    }
    let speed = (u_plus.q - u_minus.q) / (u_plus.rho - u_minus.rho);
    let flux_ratio = if u_plus.q == u_minus.q {
        T::infinity()
    } else {
        (law.flux(u_plus) - law.flux(u_minus)) / (u_plus.q - u_minus.q)
    };
    Ok(ShockSpeed {
        speed,
        flux_ratio,
        mismatch: (flux_ratio - speed).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coupling::phi_residual_scaled;

    fn air() -> GasLaw<f64> {
        GasLaw::default()
    }

    fn st(rho: f64, q: f64) -> State<f64> {
        State { rho, q }
    }

    fn problem(
        kind: CouplingKind,
        a_l: f64,
        a_r: f64,
        l: State<f64>,
        r: State<f64>,
    ) -> RiemannProblem<f64> {
        RiemannProblem::new(&air(), Junction::new(a_l, a_r, kind).unwrap(), l, r).unwrap()
    }

    #[test]
    fn classical_constant_data() {
        let fan = solve_classical(&air(), &st(1.0, 0.3), &st(1.0, 0.3)).unwrap();
        assert!(fan.is_stationary());
    }

    #[test]
    fn classical_rounded_two_shock() {
        let law = air();
        let fan = solve_classical(&law, &st(2.2, 1.387882), &st(2.0, 1.0)).unwrap();
        // The seven-digit data leave a residual 1-wave of negligible strength.
        assert!(fan
            .left_wave
            .is_none_or(|w| (w.u_right.rho - w.u_left.rho).abs() < 1e-7));
        let w = fan.right_wave.unwrap();
        assert_eq!((w.family, w.kind), (Family::Two, WaveKind::Shock));
        assert!((w.speed_left - 1.93941).abs() < 1e-3);
    }

    #[test]
    fn classical_rounded_one_shock() {
        let fan = solve_classical(&air(), &st(1.0, 0.0), &st(1.3, -0.4160525)).unwrap();
        assert!(fan
            .right_wave
            .is_none_or(|w| (w.u_right.rho - w.u_left.rho).abs() < 1e-7));
        let w = fan.left_wave.unwrap();
        assert_eq!((w.family, w.kind), (Family::One, WaveKind::Shock));
        assert!((w.speed_left + 1.38684).abs() < 1e-4);
    }

    #[test]
    fn classical_vacuum() {
        assert_eq!(
            solve_classical(&air(), &st(1.0, -7.0), &st(1.0, 7.0)),
            Err(Error::Vacuum)
        );
    }

    #[test]
    fn rarefaction_sampling_is_self_similar() {
        let law = air();
        let fan = solve_classical(&law, &st(2.0, 0.0), &st(1.0, 0.0)).unwrap();
        let w = fan.left_wave.unwrap();
        assert_eq!(w.kind, WaveKind::Rarefaction);
        for i in 1..10 {
            let xi = w.speed_left + (w.speed_right - w.speed_left) * i as f64 / 10.0;
            let u = fan.sample_xi(xi);
            assert!((law.l1(&u) - xi).abs() < 1e-8);
        }
        assert_eq!(fan.sample(1.0, -100.0).unwrap(), st(2.0, 0.0));
        assert_eq!(fan.sample(1.0, 100.0).unwrap(), st(1.0, 0.0));
        assert!(fan.sample(0.0, 1.0).is_err());
    }

    #[test]
    fn static_data_all_kinds() {
        let law = air();
        let rest = st(1.0, 0.0);
        for kind in CouplingKind::ALL {
            let p = problem(kind, 1.0, 2.0, rest, rest);
            let report = solve_junction(&law, &p).unwrap();
            assert!(report.certificate.exists, "{kind}");
            let fan = report.fan.unwrap();
            if kind == CouplingKind::LinearMomentum {
                let l = fan.left_wave.unwrap();
                let r = fan.right_wave.unwrap();
                assert_eq!((l.family, l.kind), (Family::One, WaveKind::Shock));
                assert_eq!((r.family, r.kind), (Family::Two, WaveKind::Rarefaction));
                assert!(fan.trace_minus.q < 0.0 && fan.trace_plus.q < 0.0);
            } else {
                assert!(fan.is_stationary(), "{kind}: {fan:?}");
            }
        }
    }

    #[test]
    fn equal_pressure_window_brackets_rest_state() {
        let p = problem(
            CouplingKind::EqualPressure,
            1.0,
            2.0,
            st(1.0, 0.0),
            st(1.0, 0.0),
        );
        let b = junction_bounds(&air(), &p).unwrap();
        let (lo, hi) = (b.l_prime.unwrap(), b.l_double_prime.unwrap());
        assert_eq!(lo, b.left.fu.max(b.right.fd));
        assert!(lo < 1.0 && 1.0 < hi);
    }

    #[test]
    fn traces_satisfy_coupling() {
        let law = air();
        for kind in CouplingKind::ALL {
            for (a_l, a_r) in [(1.0, 2.0), (2.0, 1.0)] {
                let p = problem(kind, a_l, a_r, st(1.2, 0.2), st(0.9, -0.1));
                let report = solve_junction(&law, &p).unwrap();
                let fan = report.fan.expect("solution exists");
                let r = phi_residual_scaled(
                    &law,
                    &p.junction,
                    &fan.trace_minus,
                    &fan.trace_plus,
                    1e-10,
                )
                .unwrap();
                assert!(
                    r[0].abs() < 1e-10 && r[1].abs() < 1e-8,
                    "{kind} {a_l}->{a_r}: {r:?}"
                );
            }
        }
    }

    #[test]
    fn equal_sections_reproduce_classical() {
        let law = air();
        let (l, r) = (st(1.5, 0.3), st(1.1, -0.2));
        let classical = solve_classical(&law, &l, &r).unwrap();
        for kind in CouplingKind::ALL {
            let fan = solve_junction(&law, &problem(kind, 1.3, 1.3, l, r))
                .unwrap()
                .fan
                .unwrap();
            assert!(
                (fan.trace_minus.rho - classical.trace_minus.rho).abs() < 1e-8,
                "{kind}"
            );
            assert!(
                (fan.trace_plus.q - classical.trace_plus.q).abs() < 1e-8,
                "{kind}"
            );
        }
    }

    #[test]
    fn engineered_refusals() {
        let law = air();
        let cases = [
            (
                CouplingKind::EqualPressure,
                1.0,
                2.0,
                st(8.0, 0.0),
                st(1.0, 0.0),
                Refusal::SonicUpper,
            ),
            (
                CouplingKind::EqualPressure,
                1.0,
                2.0,
                st(1.0, 0.0),
                st(8.0, 0.0),
                Refusal::SonicLower,
            ),
            (
                CouplingKind::DynamicPressure,
                1.0,
                2.0,
                st(8.0, 0.0),
                st(1.0, 0.0),
                Refusal::SonicUpper,
            ),
            (
                CouplingKind::LinearMomentum,
                1.0,
                2.0,
                st(1.0, 0.0),
                st(8.0, 0.0),
                Refusal::ExpansionSonicLower,
            ),
            (
                CouplingKind::LinearMomentum,
                2.0,
                1.0,
                st(8.0, 0.0),
                st(1.0, 0.0),
                Refusal::ContractionSonicUpper,
            ),
            (
                CouplingKind::SmoothSection,
                1.0,
                2.0,
                st(8.0, 0.0),
                st(1.0, 0.0),
                Refusal::ExpansionSonicUpper,
            ),
            (
                CouplingKind::SmoothSection,
                2.0,
                1.0,
                st(1.0, 0.0),
                st(8.0, 0.0),
                Refusal::ContractionSonicLower,
            ),
        ];
        for (kind, a_l, a_r, l, r, reason) in cases {
            let c = check_existence(&law, &problem(kind, a_l, a_r, l, r)).unwrap();
            assert!(!c.exists, "{kind} {reason:?}");
            assert_eq!(c.reason, Some(reason), "{kind}");
        }
    }

    #[test]
    fn shock_speed_examples() {
        let law = air();
        let s = shock_speed(&law, &st(2.2, 1.387882), &st(2.0, 1.0)).unwrap();
        assert!((s.speed - 1.93941).abs() < 1e-5 && s.mismatch < 2e-4);
        let s = shock_speed(&law, &st(1.0, 0.0), &st(1.3, -0.4160525)).unwrap();
        assert!((s.speed + 1.386842).abs() < 1e-6 && s.mismatch < 1e-4);
        let s = shock_speed(&law, &st(1.2520452, 0.5), &st(1.55, 0.1994594)).unwrap();
        assert!((s.speed + 1.00868).abs() < 2e-4);
        assert!(matches!(
            shock_speed(&law, &st(1.0, 0.0), &st(1.0, 1.0)),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn problem_rejects_supersonic_data() {
        let j = Junction::new(1.0, 2.0, CouplingKind::EqualPressure).unwrap();
        assert!(matches!(
            RiemannProblem::new(&air(), j, st(1.0, 2.0), st(1.0, 0.0)),
            Err(Error::NotSubsonic { .. })
        ));
    }
}

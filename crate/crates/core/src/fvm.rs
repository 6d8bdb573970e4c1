//! First-order Godunov scheme on two pipes joined at `x = 0`.
//!
//! Interior interfaces take their flux from the classical Riemann solver; the
//! junction interface takes the traces of the junction solver, so the left
//! pipe sees the flux of `u(t, 0−)` and the right pipe that of `u(t, 0+)`.
//! Far-field boundaries copy the outermost cell (outflow).

use serde::{Deserialize, Serialize};

use crate::coupling::Junction;
use crate::eos::{GasLaw, State};
use crate::error::{Error, Result};
use crate::riemann::{solve_classical, solve_junction, RiemannProblem};
use crate::scalar::Real;

pub const DEFAULT_CFL: f64 = 0.45;

/// Left and right pipe cells.
type PipeCells<T> = (Vec<State<T>>, Vec<State<T>>);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialData<T> {
    /// Constant state on each pipe.
    Riemann { left: State<T>, right: State<T> },
    /// One state per cell, ordered by increasing `x` on each pipe.
    Cells {
        left: Vec<State<T>>,
        right: Vec<State<T>>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig<T> {
    pub law: GasLaw<T>,
    pub junction: Junction<T>,
    /// Each pipe has length `half_length`: the domain is `[−L, L]`.
    pub half_length: T,
    pub cells_per_side: usize,
    pub cfl: T,
    pub t_end: T,
    pub initial: InitialData<T>,
}

impl<T: Real> SimConfig<T> {
    pub fn riemann(law: GasLaw<T>, junction: Junction<T>, left: State<T>, right: State<T>) -> Self {
        Self {
            law,
            junction,
            half_length: T::one(),
            cells_per_side: 200,
            cfl: T::lit(DEFAULT_CFL),
            t_end: T::lit(0.2),
            initial: InitialData::Riemann { left, right },
        }
    }

    pub fn validate(&self) -> Result<()> {
        let invalid = |msg: String| Err(Error::InvalidArgument(msg));
        if self.cells_per_side < 4 {
            return invalid(format!(
                "cells_per_side must be at least 4, got {}",
                self.cells_per_side
            ));
        }
        if !(self.cfl > T::zero() && self.cfl < T::one()) {
            return invalid(format!("cfl must lie in (0, 1), got {}", self.cfl));
        }
        if !(self.t_end > T::zero()) || !self.t_end.is_finite() {
            return invalid(format!("t_end must be positive, got {}", self.t_end));
        }
        if !(self.half_length > T::zero()) || !self.half_length.is_finite() {
            return invalid(format!(
                "half_length must be positive, got {}",
                self.half_length
            ));
        }
        Junction::new(self.junction.a_l, self.junction.a_r, self.junction.kind)?;
        let (left, right) = self.initial_cells()?;
        for (side, cells) in [("left", &left), ("right", &right)] {
            for (i, u) in cells.iter().enumerate() {
                if self.law.require_subsonic(u).is_err() {
                    return invalid(format!(
                        "initial {side} cell {i} (rho={}, q={}) is not subsonic",
                        u.rho, u.q
                    ));
                }
            }
        }
        Ok(())
    }

    fn initial_cells(&self) -> Result<PipeCells<T>> {
        let n = self.cells_per_side;
        match &self.initial {
            InitialData::Riemann { left, right } => Ok((vec![*left; n], vec![*right; n])),
            InitialData::Cells { left, right } => {
                if left.len() != n || right.len() != n {
                    return Err(Error::InvalidArgument(format!(
                        "per-cell data must have {n} cells per side, got {} and {}",
                        left.len(),
                        right.len()
                    )));
                }
                Ok((left.clone(), right.clone()))
            }
        }
    }

    pub fn dx(&self) -> T {
        self.half_length
            / T::from_usize(self.cells_per_side).expect("cell count fits the scalar type")
    }
}

/// Cell averages at one instant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot<T> {
    pub time: T,
    pub dx: T,
    pub a_l: T,
    pub a_r: T,
    /// Cell centres of the left pipe, increasing, all negative.
    pub x_left: Vec<T>,
    /// Cell centres of the right pipe, increasing, all positive.
    pub x_right: Vec<T>,
    pub left: Vec<State<T>>,
    pub right: Vec<State<T>>,
}

impl<T: Real> Snapshot<T> {
    /// Section-weighted mass `a_l·Σρ·Δx + a_r·Σρ·Δx`.
    pub fn total_mass(&self) -> T {
        let sum = |cells: &[State<T>]| cells.iter().fold(T::zero(), |acc, u| acc + u.rho);
        (self.a_l * sum(&self.left) + self.a_r * sum(&self.right)) * self.dx
    }

    /// `(x, state, section)` for every cell, left to right.
    pub fn cells(&self) -> impl Iterator<Item = (T, State<T>, T)> + '_ {
        let left = self
            .x_left
            .iter()
            .zip(&self.left)
            .map(|(x, u)| (*x, *u, self.a_l));
        let right = self
            .x_right
            .iter()
            .zip(&self.right)
            .map(|(x, u)| (*x, *u, self.a_r));
        left.chain(right)
    }
}

/// What one time step did at the domain boundaries and the junction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepInfo<T> {
    pub dt: T,
    /// `a·q` leaving the left pipe through the junction.
    pub junction_mass_minus: T,
    /// `a·q` entering the right pipe through the junction.
    pub junction_mass_plus: T,
    /// Net section-weighted mass entering through the far-field boundaries
    /// during the step.
    pub boundary_mass_inflow: T,
}

/// Godunov scheme state, advanced step by step.
#[derive(Debug, Clone)]
pub struct Simulation<T> {
    config: SimConfig<T>,
    dx: T,
    time: T,
    steps: usize,
    left: Vec<State<T>>,
    right: Vec<State<T>>,
    junction_cache: Option<JunctionCache<T>>,
}

#[derive(Debug, Clone, Copy)]
struct JunctionCache<T> {
    cells: (State<T>, State<T>),
    traces: (State<T>, State<T>),
    max_speed: T,
}

fn flux<T: Real>(law: &GasLaw<T>, u: &State<T>) -> [T; 2] {
    [u.q, law.flux(u)]
}

impl<T: Real> Simulation<T> {
    pub fn new(config: SimConfig<T>) -> Result<Self> {
        config.validate()?;
        let (left, right) = config.initial_cells()?;
        Ok(Self {
            dx: config.dx(),
            config,
            time: T::zero(),
            steps: 0,
            left,
            right,
            junction_cache: None,
        })
    }

    pub fn time(&self) -> T {
        self.time
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn config(&self) -> &SimConfig<T> {
        &self.config
    }

    pub fn snapshot(&self) -> Snapshot<T> {
        let n = self.config.cells_per_side;
        let half = T::lit(0.5);
        let centre =
            |i: usize| (T::from_usize(i).expect("index fits the scalar type") + half) * self.dx;
        Snapshot {
            time: self.time,
            dx: self.dx,
            a_l: self.config.junction.a_l,
            a_r: self.config.junction.a_r,
            x_left: (0..n)
                .map(|i| centre(i) - self.config.half_length)
                .collect(),
            x_right: (0..n).map(centre).collect(),
            left: self.left.clone(),
            right: self.right.clone(),
        }
    }

    fn junction_traces(&mut self) -> Result<JunctionCache<T>> {
        let cells = (*self.left.last().expect("non-empty pipe"), self.right[0]);
        if let Some(cache) = self.junction_cache {
            if cache.cells == cells {
                return Ok(cache);
            }
        }
        let law = &self.config.law;
        let abort = |reason: String| Error::Simulation {
            time: self.time.f64(),
            reason,
        };
        let problem = RiemannProblem::new(law, self.config.junction, cells.0, cells.1)
            .map_err(|e| abort(format!("junction cells left the subsonic region: {e}")))?;
        let report = solve_junction(law, &problem)
            .map_err(|e| abort(format!("junction solver failed: {e}")))?;
        let fan = report.fan.ok_or_else(|| {
            abort(format!(
                "no junction solution for cells (rho={}, q={}) | (rho={}, q={}): {}",
                cells.0.rho,
                cells.0.q,
                cells.1.rho,
                cells.1.q,
                report
                    .certificate
                    .reason
                    .map_or("unknown".to_string(), |r| r.to_string())
            ))
        })?;
        let cache = JunctionCache {
            cells,
            traces: (fan.trace_minus, fan.trace_plus),
            max_speed: fan.max_speed(),
        };
        self.junction_cache = Some(cache);
        Ok(cache)
    }

    /// Godunov flux between two cells of the same pipe, and the fan's
    /// largest speed.
    fn interface(&self, u_l: &State<T>, u_r: &State<T>) -> Result<([T; 2], T)> {
        let law = &self.config.law;
        if u_l == u_r {
            return Ok((flux(law, u_l), law.l1(u_l).abs().max(law.l2(u_l).abs())));
        }
        let fan = solve_classical(law, u_l, u_r).map_err(|e| Error::Simulation {
            time: self.time.f64(),
            reason: format!("interface Riemann problem failed: {e}"),
        })?;
        Ok((flux(law, &fan.sample_xi(T::zero())), fan.max_speed()))
    }

    /// Fluxes at the `n + 1` interfaces of a pipe, given the inner trace flux
    /// at the junction end.
    fn pipe_fluxes(
        &self,
        cells: &[State<T>],
        junction_flux: [T; 2],
        junction_on_right: bool,
    ) -> Result<(Vec<[T; 2]>, T)> {
        let law = &self.config.law;
        let n = cells.len();
        let mut fluxes = Vec::with_capacity(n + 1);
        let mut max_speed = T::zero();
        let outer = |u: &State<T>| (flux(law, u), law.l1(u).abs().max(law.l2(u).abs()));
        if junction_on_right {
            let (f, s) = outer(&cells[0]);
            fluxes.push(f);
            max_speed = max_speed.max(s);
        } else {
            fluxes.push(junction_flux);
        }
        for i in 0..n - 1 {
            let (f, s) = self.interface(&cells[i], &cells[i + 1])?;
            fluxes.push(f);
            max_speed = max_speed.max(s);
        }
        if junction_on_right {
            fluxes.push(junction_flux);
        } else {
            let (f, s) = outer(&cells[n - 1]);
            fluxes.push(f);
            max_speed = max_speed.max(s);
        }
        Ok((fluxes, max_speed))
    }

    /// Advances one step of at most `max_dt`.
    pub fn step(&mut self, max_dt: T) -> Result<StepInfo<T>> {
        if !(max_dt > T::zero()) {
            return Err(Error::InvalidArgument(format!(
                "step bound must be positive, got {max_dt}"
            )));
        }
        let law = self.config.law;
        let junction = self.junction_traces()?;
        let (minus, plus) = junction.traces;
        let (left_fluxes, s_l) = self.pipe_fluxes(&self.left, flux(&law, &minus), true)?;
        let (right_fluxes, s_r) = self.pipe_fluxes(&self.right, flux(&law, &plus), false)?;
        let speed = s_l.max(s_r).max(junction.max_speed);
        if !(speed > T::zero()) || !speed.is_finite() {
            return Err(Error::Simulation {
                time: self.time.f64(),
                reason: format!("invalid wave speed {speed}"),
            });
        }
        let dt = (self.config.cfl * self.dx / speed).min(max_dt);
        let ratio = dt / self.dx;
        let update = |cells: &mut [State<T>], fluxes: &[[T; 2]]| {
            for (i, u) in cells.iter_mut().enumerate() {
                u.rho = u.rho - ratio * (fluxes[i + 1][0] - fluxes[i][0]);
                u.q = u.q - ratio * (fluxes[i + 1][1] - fluxes[i][1]);
            }
        };
        update(&mut self.left, &left_fluxes);
        update(&mut self.right, &right_fluxes);
        self.time = self.time + dt;
        self.steps += 1;
        if let Some((i, u)) = self
            .left
            .iter()
            .chain(&self.right)
            .enumerate()
            .find(|(_, u)| !(u.rho > T::zero()))
        {
            return Err(Error::Simulation {
                time: self.time.f64(),
                reason: format!("cell {i} lost positivity (rho={})", u.rho),
            });
        }
        let (a_l, a_r) = (self.config.junction.a_l, self.config.junction.a_r);
        let n = self.config.cells_per_side;
        Ok(StepInfo {
            dt,
            junction_mass_minus: a_l * minus.q,
            junction_mass_plus: a_r * plus.q,
            boundary_mass_inflow: dt * (a_l * left_fluxes[0][0] - a_r * right_fluxes[n][0]),
        })
    }

    /// Steps until `t`, landing on it exactly.
    pub fn advance_to(&mut self, t: T) -> Result<()> {
        while self.time < t {
            let remaining = t - self.time;
            if remaining <= T::epsilon() * t.abs().max(T::one()) {
                self.time = t;
                break;
            }
            self.step(remaining)?;
        }
        Ok(())
    }
}

/// Runs the simulation and returns a snapshot at each requested time (sorted,
/// each in `(0, t_end]`); `t_end` is always included.
pub fn simulate<T: Real>(config: &SimConfig<T>, snapshot_times: &[T]) -> Result<Vec<Snapshot<T>>> {
    let mut times: Vec<T> = snapshot_times.to_vec();
    for t in &times {
        if !(*t > T::zero() && *t <= config.t_end) {
            return Err(Error::InvalidArgument(format!(
                "snapshot time {t} outside (0, {}]",
                config.t_end
            )));
        }
    }
    times.push(config.t_end);
    times.sort_by(|a, b| a.partial_cmp(b).expect("finite times"));
    times.dedup();
    let mut sim = Simulation::new(config.clone())?;
    let mut snapshots = Vec::with_capacity(times.len());
    for t in times {
        sim.advance_to(t)?;
        snapshots.push(sim.snapshot());
    }
    Ok(snapshots)
}

/// Section-weighted L¹ distances per conserved field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct L1Error<T> {
    pub rho: T,
    pub q: T,
}

/// `Σ a·|cell − exact(centre)|·Δx` per field.
pub fn l1_error<T: Real, F: FnMut(T) -> State<T>>(
    snapshot: &Snapshot<T>,
    mut exact: F,
) -> L1Error<T> {
    let mut err = L1Error {
        rho: T::zero(),
        q: T::zero(),
    };
    for (x, u, a) in snapshot.cells() {
        let e = exact(x);
        err.rho = err.rho + a * (u.rho - e.rho).abs() * snapshot.dx;
        err.q = err.q + a * (u.q - e.q).abs() * snapshot.dx;
    }
    err
}

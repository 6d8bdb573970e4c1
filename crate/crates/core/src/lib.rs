//! Exact Riemann solvers for the isentropic Euler equations (p-system) at a
//! junction between two pipes of different sections.
//!
//! The solvers are generic over the scalar type ([`Real`], implemented for
//! `f32` and `f64`); the `*64` aliases fix double precision.
//!
//! ```
//! use jrs_core::{transmit, CouplingKind, GasLaw64, Junction, State};
//!
//! let law = GasLaw64::default();
//! let junction = Junction::new(1.0, 2.0, CouplingKind::DynamicPressure).unwrap();
//! let u_r = transmit(&law, &junction, &State { rho: 2.0, q: 1.0 }).unwrap();
//! assert!((u_r.rho - 2.2051669).abs() < 1e-6);
//! ```

// `!(x > 0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod coupling;
pub mod eos;
pub mod error;
pub mod fvm;
pub mod lax;
mod ode;
pub mod riemann;
mod roots;
pub mod scalar;

pub use coupling::{
    audit_properties, integrate_rq, jacobian_determinant, phi_residual, phi_residual_scaled,
    phi_residual_with_tol, s_integral, transmit, transmit_with_tol, AuditConfig, CouplingKind,
    Junction, OdePath, OdeSample, PropertyCheck, PropertyReport, DEFAULT_TOL,
};
pub use eos::{GasLaw, State};
pub use error::{Error, Result};
pub use fvm::{
    l1_error, simulate, InitialData, L1Error, SimConfig, Simulation, Snapshot, StepInfo,
    DEFAULT_CFL,
};
pub use lax::{
    invert_reversed_2, lax_curve, rarefaction_integral, sonic_bounds, Direction, Family, Side,
    SonicBounds,
};
pub use riemann::{
    check_existence, check_existence_with_tol, junction_bounds, junction_root_function,
    shock_speed, smooth_section_psi, solve_classical, solve_junction, solve_junction_with_tol,
    Certificate, JunctionBounds, Refusal, RiemannProblem, ShockSpeed, SolveReport, Wave, WaveFan,
    WaveKind,
};
pub use scalar::Real;

pub type GasLaw64 = GasLaw<f64>;
pub type State64 = State<f64>;
pub type Junction64 = Junction<f64>;
pub type RiemannProblem64 = RiemannProblem<f64>;
pub type WaveFan64 = WaveFan<f64>;
pub type SolveReport64 = SolveReport<f64>;
pub type Certificate64 = Certificate<f64>;
pub type SimConfig64 = SimConfig<f64>;
pub type Snapshot64 = Snapshot<f64>;

pub type GasLaw32 = GasLaw<f32>;
pub type State32 = State<f32>;
pub type Junction32 = Junction<f32>;
pub type RiemannProblem32 = RiemannProblem<f32>;
pub type WaveFan32 = WaveFan<f32>;

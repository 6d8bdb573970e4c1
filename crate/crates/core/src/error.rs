use thiserror::Error;

/// Errors raised by the solvers. Values are widened to `f64` so the type is
/// shared by every scalar instantiation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{what} must be positive, got {value}")]
    Domain { what: &'static str, value: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("state (rho={rho}, q={q}) is not subsonic")]
    NotSubsonic { rho: f64, q: f64 },

    #[error("could not bracket a root of {what} (last bracket [{lo}, {hi}])")]
    Bracket {
        what: &'static str,
        lo: f64,
        hi: f64,
    },

    #[error("{what} did not converge within {iterations} iterations")]
    NoConvergence {
        what: &'static str,
        iterations: usize,
    },

    #[error("target momentum {target} outside the attainable range [{lo}, {hi}]")]
    OutOfRange { target: f64, lo: f64, hi: f64 },

    #[error("sonic singularity in the section ODE at a={a} (R={r})")]
    Singularity { a: f64, r: f64 },

    #[error("no subsonic stationary partner for kind {kind}: {reason}")]
    Transmission { kind: char, reason: String },

    #[error("Riemann problem produces vacuum")]
    Vacuum,

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("internal consistency failure: {0}")]
    Inconsistent(String),

    #[error("simulation aborted at t={time}: {reason}")]
    Simulation { time: f64, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;

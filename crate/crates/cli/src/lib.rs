//! Scenario runner around `jrs-core`: TOML scenario files, built-in
//! reproductions of the classic junction experiments, and deterministic
//! CSV/JSON output.

pub mod error;
pub mod format;
pub mod report;
pub mod runner;
pub mod scenario;

pub use error::{CliError, Result};
pub use report::{Format, RunReport};
pub use runner::run_scenario;
pub use scenario::{Mode, Scenario};

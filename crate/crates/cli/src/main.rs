use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use jrs_cli::report::Outcome;
use jrs_cli::runner::{default_tol, parse_tol};
use jrs_cli::scenario::{builtin, builtin_names};
use jrs_cli::{run_scenario, CliError, Format, Mode, Result, RunReport, Scenario};

#[derive(Parser)]
#[command(
    name = "jrs",
    version,
    about = "Exact Riemann solutions at a pipe junction"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the junction Riemann problem and sample the fan.
    Solve(RunArgs),
    /// Stationary right-pipe states for the left data.
    Stationary(RunArgs),
    /// Scan right data for solvability at fixed left data.
    ExistenceMap(RunArgs),
    /// Run the finite-volume scheme.
    Simulate(RunArgs),
    /// Randomised audit of the coupling properties.
    Audit(RunArgs),
    /// Run a scenario in its own mode.
    Run(RunArgs),
    /// Run every built-in scenario.
    RunAll(CommonArgs),
    /// List the built-in scenarios.
    ListScenarios,
}

#[derive(Args)]
struct RunArgs {
    /// Built-in scenario name or path to a TOML file.
    #[arg(long)]
    scenario: Option<String>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct CommonArgs {
    /// Coupling kind: L, p, P, S or all (overrides the scenario).
    #[arg(long)]
    kind: Option<String>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Solver tolerance (default from JRS_DEFAULT_TOL, else 1e-8).
    #[arg(long, value_parser = parse_tol)]
    tol: Option<f64>,
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("jrs: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn execute(cli: Cli) -> Result<()> {
    let (mode, args) = match cli.command {
        Command::ListScenarios => {
            for name in builtin_names() {
                let s = builtin(name).expect("built-in");
                println!("{name:<10} {:<14} {}", s.mode.name(), s.description);
            }
            return Ok(());
        }
        Command::RunAll(common) => {
            let tol = tolerance(&common)?;
            for name in builtin_names() {
                let mut scenario = builtin(name).expect("built-in");
                apply_kind(&mut scenario, &common);
                run_and_write(&scenario, tol, &common.out, common.format)?;
            }
            return Ok(());
        }
        Command::Solve(a) => (Some(Mode::Solve), a),
        Command::Stationary(a) => (Some(Mode::Stationary), a),
        Command::ExistenceMap(a) => (Some(Mode::ExistenceMap), a),
        Command::Simulate(a) => (Some(Mode::Simulate), a),
        Command::Audit(a) => (Some(Mode::Audit), a),
        Command::Run(a) => (None, a),
    };
    let name = match (&args.scenario, mode) {
        (Some(s), _) => s.clone(),
        (None, Some(m)) => default_scenario(m).to_string(),
        (None, None) => return Err(CliError::Validation("run: --scenario is required".into())),
    };
    let mut scenario = Scenario::load(&name)?;
    if let Some(m) = mode {
        scenario.mode = m;
    }
    apply_kind(&mut scenario, &args.common);
    let tol = tolerance(&args.common)?;
    run_and_write(&scenario, tol, &args.common.out, args.common.format)
}

fn default_scenario(mode: Mode) -> &'static str {
    match mode {
        Mode::Solve => "fig4",
        Mode::Stationary => "table1",
        Mode::ExistenceMap => "existence",
        Mode::Simulate => "fig4-fvm",
        Mode::Audit => "audit",
    }
}

fn tolerance(args: &CommonArgs) -> Result<f64> {
    args.tol.map_or_else(default_tol, Ok)
}

fn apply_kind(scenario: &mut Scenario, args: &CommonArgs) {
    if let Some(k) = &args.kind {
        scenario.junction.kind = k.clone();
    }
}

fn run_and_write(scenario: &Scenario, tol: f64, out: &Path, format: Format) -> Result<()> {
    let report = run_scenario(scenario, tol)?;
    let written = report.write(&out.join(&scenario.name), format)?;
    summarize(&report);
    for path in written {
        println!("  wrote {}", path.display());
    }
    Ok(())
}

fn summarize(report: &RunReport) {
    println!(
        "{} ({}), {} ms",
        report.scenario.name,
        report.scenario.mode.name(),
        report.elapsed_ms
    );
    for r in &report.results {
        let line = match &r.outcome {
            Outcome::Solve(s) => match (&s.error, &s.certificate) {
                (Some(e), _) => format!("error: {e}"),
                (None, Some(c)) if c.exists => {
                    let waves: Vec<String> = s
                        .waves
                        .iter()
                        .map(|w| format!("{}-{}", w.family, w.wave))
                        .collect();
                    if waves.is_empty() {
                        "stationary".into()
                    } else {
                        waves.join(", ")
                    }
                }
                (None, Some(c)) => format!(
                    "no solution: {}",
                    c.reason.map_or("unknown", |r| r.description())
                ),
                (None, None) => "no certificate".into(),
            },
            Outcome::Stationary(s) => match s.right {
                Some(p) => format!("u_r = ({}, {})", p.rho, p.q),
                None => format!("error: {}", s.error.as_deref().unwrap_or("")),
            },
            Outcome::ExistenceMap(m) => {
                format!(
                    "{}/{} grid points solvable",
                    m.points.iter().filter(|p| p.exists).count(),
                    m.points.len()
                )
            }
            Outcome::Simulate(s) => match &s.error {
                Some(e) => format!("error: {e}"),
                None => format!("{} snapshots, dx = {}", s.snapshots.len(), s.dx),
            },
            Outcome::Audit(a) => match &a.error {
                Some(e) => format!("error: {e}"),
                None => format!(
                    "{} samples, {} skipped, min det {:?}",
                    a.samples, a.skipped, a.min_determinant
                ),
            },
        };
        println!("  {}: {line}", r.kind);
    }
}

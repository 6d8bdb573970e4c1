use std::time::Instant;

use jrs_core::{
    audit_properties, check_existence_with_tol, simulate, solve_junction_with_tol,
    transmit_with_tol, CouplingKind, GasLaw64, RiemannProblem, State,
};

use crate::error::Result;
use crate::format::round_sig;
use crate::report::{
    AuditOutcome, CertificateRecord, ExistenceOutcome, KindResult, MapPoint, Outcome, ProfileRow,
    RunReport, SimulateOutcome, SnapshotRecord, SolveOutcome, StationaryOutcome, WaveRecord,
};
use crate::scenario::{Mode, Scenario};

/// Environment variable overriding [`jrs_core::DEFAULT_TOL`].
pub const TOL_ENV: &str = "JRS_DEFAULT_TOL";

/// Default solver tolerance, honouring [`TOL_ENV`].
pub fn default_tol() -> Result<f64> {
    match std::env::var(TOL_ENV) {
        Ok(s) => parse_tol(&s).map_err(|e| crate::error::CliError::validation(TOL_ENV, e)),
        Err(_) => Ok(jrs_core::DEFAULT_TOL),
    }
}

pub fn parse_tol(s: &str) -> std::result::Result<f64, String> {
    match s.trim().parse::<f64>() {
        Ok(t) if t > 0.0 && t < 1.0 => Ok(t),
        _ => Err(format!("tolerance must be a number in (0, 1), got {s:?}")),
    }
}

/// Validates and runs a scenario. Solver refusals and numeric failures of a
/// single kind are recorded in the report; only invalid input is an error.
pub fn run_scenario(scenario: &Scenario, tol: f64) -> Result<RunReport> {
    scenario.validate()?;
    let start = Instant::now();
    let law = scenario.law()?;
    let mut results = Vec::new();
    for kind in scenario.kinds()? {
        let t0 = Instant::now();
        let outcome = match scenario.mode {
            Mode::Solve => Outcome::Solve(run_solve(scenario, &law, kind, tol)?),
            Mode::Stationary => Outcome::Stationary(run_stationary(scenario, &law, kind, tol)?),
            Mode::ExistenceMap => Outcome::ExistenceMap(run_existence(scenario, &law, kind, tol)?),
            Mode::Simulate => Outcome::Simulate(run_simulate(scenario, kind)?),
            Mode::Audit => Outcome::Audit(run_audit(scenario, &law, kind, tol)),
        };
        results.push(KindResult {
            kind,
            elapsed_ms: elapsed_ms(t0),
            outcome,
        });
    }
    Ok(RunReport {
        scenario: scenario.clone(),
        tol,
        results,
        elapsed_ms: elapsed_ms(start),
    })
}

fn elapsed_ms(t0: Instant) -> f64 {
    round_sig(t0.elapsed().as_secs_f64() * 1e3)
}

fn run_solve(
    scenario: &Scenario,
    law: &GasLaw64,
    kind: CouplingKind,
    tol: f64,
) -> Result<SolveOutcome> {
    let (left, right) = (scenario.left_state(kind)?, scenario.right_state(kind)?);
    let out = scenario.output.expect("validated");
    let mut outcome = SolveOutcome {
        left: left.into(),
        right: right.into(),
        t: out.t,
        certificate: None,
        trace_minus: None,
        trace_plus: None,
        waves: Vec::new(),
        profile: Vec::new(),
        error: None,
    };
    let problem = RiemannProblem::new(law, scenario.junction(kind)?, left, right)?;
    let report = match solve_junction_with_tol(law, &problem, tol) {
        Ok(r) => r,
        Err(e) => {
            outcome.error = Some(e.to_string());
            return Ok(outcome);
        }
    };
    outcome.certificate = Some(CertificateRecord::from(&report.certificate));
    let Some(fan) = report.fan else {
        return Ok(outcome);
    };
    outcome.trace_minus = Some(fan.trace_minus.into());
    outcome.trace_plus = Some(fan.trace_plus.into());
    outcome.waves = fan.waves().map(WaveRecord::from).collect();
    let n = out.samples;
    for i in 0..n {
        let x = out.x_min + (out.x_max - out.x_min) * i as f64 / (n - 1) as f64;
        let u = fan.sample(out.t, x)?;
        outcome.profile.push(ProfileRow {
            x: round_sig(x),
            rho: round_sig(u.rho),
            q: round_sig(u.q),
        });
    }
    Ok(outcome)
}

fn run_stationary(
    scenario: &Scenario,
    law: &GasLaw64,
    kind: CouplingKind,
    tol: f64,
) -> Result<StationaryOutcome> {
    let left = scenario.left_state(kind)?;
    Ok(
        match transmit_with_tol(law, &scenario.junction(kind)?, &left, tol) {
            Ok(u) => StationaryOutcome {
                left: left.into(),
                right: Some(u.into()),
                error: None,
            },
            Err(e) => StationaryOutcome {
                left: left.into(),
                right: None,
                error: Some(e.to_string()),
            },
        },
    )
}

fn run_existence(
    scenario: &Scenario,
    law: &GasLaw64,
    kind: CouplingKind,
    tol: f64,
) -> Result<ExistenceOutcome> {
    let left = scenario.left_state(kind)?;
    let junction = scenario.junction(kind)?;
    let m = scenario.map.expect("validated");
    let mut points = Vec::with_capacity(m.n_rho * m.n_q);
    for i in 0..m.n_rho {
        let rho_r = m.rho_min + (m.rho_max - m.rho_min) * i as f64 / (m.n_rho - 1) as f64;
        for j in 0..m.n_q {
            let q_r = m.q_min + (m.q_max - m.q_min) * j as f64 / (m.n_q - 1) as f64;
            let right = State { rho: rho_r, q: q_r };
            let (exists, boundary, reason) = match RiemannProblem::new(law, junction, left, right) {
                Err(_) => (false, false, Some("supersonic right data".to_string())),
                Ok(p) => match check_existence_with_tol(law, &p, tol) {
                    Ok(c) => (
                        c.exists,
                        c.boundary,
                        c.reason.map(|r| r.description().to_string()),
                    ),
                    Err(e) => (false, false, Some(format!("error: {e}"))),
                },
            };
            points.push(MapPoint {
                rho_r: round_sig(rho_r),
                q_r: round_sig(q_r),
                exists,
                boundary,
                reason,
            });
        }
    }
    Ok(ExistenceOutcome {
        left: left.into(),
        points,
    })
}

fn run_simulate(scenario: &Scenario, kind: CouplingKind) -> Result<SimulateOutcome> {
    let config = scenario.sim_config(kind)?;
    let sim = scenario.sim.as_ref().expect("validated");
    let mut outcome = SimulateOutcome {
        cells_per_side: config.cells_per_side,
        dx: round_sig(config.dx()),
        snapshots: Vec::new(),
        error: None,
    };
    match simulate(&config, &sim.snapshots) {
        Ok(snaps) => {
            for s in snaps {
                let cells = s
                    .cells()
                    .map(|(x, u, _)| ProfileRow {
                        x: round_sig(x),
                        rho: round_sig(u.rho),
                        q: round_sig(u.q),
                    })
                    .collect();
                outcome.snapshots.push(SnapshotRecord {
                    t: round_sig(s.time),
                    mass: round_sig(s.total_mass()),
                    cells,
                });
            }
        }
        Err(e) => outcome.error = Some(e.to_string()),
    }
    Ok(outcome)
}

fn run_audit(scenario: &Scenario, law: &GasLaw64, kind: CouplingKind, tol: f64) -> AuditOutcome {
    let mut config = scenario.audit_config().expect("validated");
    config.tol = config.tol.min(tol);
    let mut outcome = AuditOutcome {
        samples: config.samples,
        seed: config.seed,
        no_junction: None,
        symmetry: None,
        consistency: None,
        hydrostatic: None,
        min_determinant: None,
        skipped: 0,
        error: None,
    };
    match audit_properties(law, kind, &config) {
        Ok(r) => {
            outcome.no_junction = Some(r.no_junction.into());
            outcome.symmetry = Some(r.symmetry.into());
            outcome.consistency = Some(r.consistency.into());
            outcome.hydrostatic = Some(r.hydrostatic.into());
            outcome.min_determinant = r
                .min_determinant
                .is_finite()
                .then(|| round_sig(r.min_determinant));
            outcome.skipped = r.skipped;
        }
        Err(e) => outcome.error = Some(e.to_string()),
    }
    outcome
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::builtin;

    #[test]
    fn table_scenario_transmits_every_kind() {
        let report = run_scenario(&builtin("table1").unwrap(), 1e-10).unwrap();
        let rho: Vec<f64> = report
            .results
            .iter()
            .map(|r| match &r.outcome {
                Outcome::Stationary(s) => s.right.unwrap().rho,
                other => panic!("{other:?}"),
            })
            .collect();
        let expected = [1.2520452, 2.0, 2.2051669, 2.1064869];
        for (got, want) in rho.iter().zip(expected) {
            assert!((got - want).abs() < 1e-5, "{rho:?}");
        }
    }

    #[test]
    fn tolerance_strings() {
        assert_eq!(parse_tol("1e-9"), Ok(1e-9));
        assert!(parse_tol("0").is_err() && parse_tol("abc").is_err() && parse_tol("2").is_err());
    }
}

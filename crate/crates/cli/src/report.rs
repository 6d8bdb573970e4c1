//! Run reports and their file forms.
//!
//! Every float stored in a report is already rounded to nine significant
//! digits, so the JSON and CSV forms carry the same numbers.

use std::fs;
use std::path::{Path, PathBuf};

use jrs_core::{CouplingKind, Refusal, State, WaveKind};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};
use crate::format::{fmt_g, round_sig};
use crate::scenario::Scenario;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub rho: f64,
    pub q: f64,
}

impl From<State<f64>> for Point {
    fn from(u: State<f64>) -> Self {
        Self {
            rho: round_sig(u.rho),
            q: round_sig(u.q),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub scenario: Scenario,
    pub tol: f64,
    pub results: Vec<KindResult>,
    /// Wall-clock time; kept out of the CSV files.
    pub elapsed_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KindResult {
    pub kind: CouplingKind,
    pub elapsed_ms: f64,
    pub outcome: Outcome,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Solve(SolveOutcome),
    Stationary(StationaryOutcome),
    ExistenceMap(ExistenceOutcome),
    Simulate(SimulateOutcome),
    Audit(AuditOutcome),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateRecord {
    pub exists: bool,
    pub boundary: bool,
    pub l_prime: Option<f64>,
    pub l_double_prime: Option<f64>,
    pub lower_margin: Option<f64>,
    pub upper_margin: Option<f64>,
    pub reason: Option<Refusal>,
}

impl From<&jrs_core::Certificate<f64>> for CertificateRecord {
    fn from(c: &jrs_core::Certificate<f64>) -> Self {
        Self {
            exists: c.exists,
            boundary: c.boundary,
            l_prime: c.l_prime.map(round_sig),
            l_double_prime: c.l_double_prime.map(round_sig),
            lower_margin: c.lower_margin.map(round_sig),
            upper_margin: c.upper_margin.map(round_sig),
            reason: c.reason,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveRecord {
    pub family: u8,
    pub wave: WaveKind,
    pub speed_left: f64,
    pub speed_right: f64,
    pub left: Point,
    pub right: Point,
}

impl From<&jrs_core::Wave<f64>> for WaveRecord {
    fn from(w: &jrs_core::Wave<f64>) -> Self {
        Self {
            family: w.family.index(),
            wave: w.kind,
            speed_left: round_sig(w.speed_left),
            speed_right: round_sig(w.speed_right),
            left: w.u_left.into(),
            right: w.u_right.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileRow {
    pub x: f64,
    pub rho: f64,
    pub q: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveOutcome {
    pub left: Point,
    pub right: Point,
    pub t: f64,
    pub certificate: Option<CertificateRecord>,
    pub trace_minus: Option<Point>,
    pub trace_plus: Option<Point>,
    pub waves: Vec<WaveRecord>,
    pub profile: Vec<ProfileRow>,
    /// Set when the solver failed numerically rather than refusing.
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StationaryOutcome {
    pub left: Point,
    pub right: Option<Point>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapPoint {
    pub rho_r: f64,
    pub q_r: f64,
    pub exists: bool,
    pub boundary: bool,
    /// Refusal description, `supersonic right data`, or a numeric error.
    pub reason: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExistenceOutcome {
    pub left: Point,
    pub points: Vec<MapPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotRecord {
    pub t: f64,
    pub mass: f64,
    pub cells: Vec<ProfileRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulateOutcome {
    pub cells_per_side: usize,
    pub dx: f64,
    pub snapshots: Vec<SnapshotRecord>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub checked: usize,
    pub max_violation: f64,
    pub min_violation: Option<f64>,
}

impl From<jrs_core::PropertyCheck> for CheckRecord {
    fn from(c: jrs_core::PropertyCheck) -> Self {
        Self {
            checked: c.checked,
            max_violation: round_sig(c.max_violation),
            min_violation: (c.checked > 0).then(|| round_sig(c.min_violation)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditOutcome {
    pub samples: usize,
    pub seed: u64,
    pub no_junction: Option<CheckRecord>,
    pub symmetry: Option<CheckRecord>,
    pub consistency: Option<CheckRecord>,
    pub hydrostatic: Option<CheckRecord>,
    pub min_determinant: Option<f64>,
    pub skipped: usize,
    pub error: Option<String>,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports contain only finite numbers")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| CliError::Validation(format!("report: {e}")))
    }

    /// Writes `report.json`, plus the mode's CSV tables for [`Format::Csv`].
    /// Returns the paths written.
    pub fn write(&self, dir: &Path, format: Format) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        let mut written = Vec::new();
        let json = dir.join("report.json");
        fs::write(&json, self.to_json() + "\n").map_err(|e| CliError::io(&json, e))?;
        written.push(json);
        if format == Format::Csv {
            for (file, table) in self.tables() {
                let path = dir.join(file);
                write_csv(&path, &table)?;
                written.push(path);
            }
        }
        Ok(written)
    }

    /// CSV tables of this report as `(file name, rows)`; the first row is the
    /// header.
    pub fn tables(&self) -> Vec<(&'static str, Vec<Vec<String>>)> {
        let mut profile = vec![row(["x", "rho", "q", "kind", "t"])];
        let mut waves = vec![row(["kind", "family", "wave", "speed_left", "speed_right"])];
        let mut stationary = vec![row(["kind", "rho_l", "q_l", "rho_r", "q_r", "error"])];
        let mut existence = vec![row(["rho_r", "q_r", "kind", "exists", "reason"])];
        let mut audit = vec![row([
            "kind",
            "property",
            "checked",
            "max_violation",
            "min_violation",
        ])];
        for r in &self.results {
            let kind = r.kind.to_string();
            match &r.outcome {
                Outcome::Solve(s) => {
                    for p in &s.profile {
                        profile.push(vec![
                            fmt_g(p.x),
                            fmt_g(p.rho),
                            fmt_g(p.q),
                            kind.clone(),
                            fmt_g(s.t),
                        ]);
                    }
                    for w in &s.waves {
                        waves.push(vec![
                            kind.clone(),
                            w.family.to_string(),
                            w.wave.to_string(),
                            fmt_g(w.speed_left),
                            fmt_g(w.speed_right),
                        ]);
                    }
                }
                Outcome::Simulate(s) => {
                    for snap in &s.snapshots {
                        for p in &snap.cells {
                            profile.push(vec![
                                fmt_g(p.x),
                                fmt_g(p.rho),
                                fmt_g(p.q),
                                kind.clone(),
                                fmt_g(snap.t),
                            ]);
                        }
                    }
                }
                Outcome::Stationary(s) => {
                    let (rho_r, q_r) = s.right.map_or((String::new(), String::new()), |p| {
                        (fmt_g(p.rho), fmt_g(p.q))
                    });
                    stationary.push(vec![
                        kind,
                        fmt_g(s.left.rho),
                        fmt_g(s.left.q),
                        rho_r,
                        q_r,
                        s.error.clone().unwrap_or_default(),
                    ]);
                }
                Outcome::ExistenceMap(m) => {
                    for p in &m.points {
                        existence.push(vec![
                            fmt_g(p.rho_r),
                            fmt_g(p.q_r),
                            kind.clone(),
                            p.exists.to_string(),
                            p.reason.clone().unwrap_or_default(),
                        ]);
                    }
                }
                Outcome::Audit(a) => {
                    let checks = [
                        ("no_junction", a.no_junction),
                        ("symmetry", a.symmetry),
                        ("consistency", a.consistency),
                        ("hydrostatic", a.hydrostatic),
                    ];
                    for (name, check) in checks {
                        let Some(c) = check else { continue };
                        audit.push(vec![
                            kind.clone(),
                            name.into(),
                            c.checked.to_string(),
                            fmt_g(c.max_violation),
                            c.min_violation.map(fmt_g).unwrap_or_default(),
                        ]);
                    }
                    if let Some(d) = a.min_determinant {
                        audit.push(vec![
                            kind,
                            "min_determinant".into(),
                            a.samples.to_string(),
                            fmt_g(d),
                            fmt_g(d),
                        ]);
                    }
                }
            }
        }
        [
            ("profile.csv", profile),
            ("waves.csv", waves),
            ("stationary.csv", stationary),
            ("existence.csv", existence),
            ("audit.csv", audit),
        ]
        .into_iter()
        .filter(|(_, rows)| rows.len() > 1)
        .collect()
    }
}

fn row<const N: usize>(cells: [&str; N]) -> Vec<String> {
    cells.iter().map(|s| s.to_string()).collect()
}

fn write_csv(path: &Path, rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| CliError::io(path, e))?;
    for r in rows {
        w.write_record(r).map_err(|e| CliError::io(path, e))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

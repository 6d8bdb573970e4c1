//! Scenario files: TOML with one section per concern.
//!
//! ```toml
//! name = "fig5"
//! mode = "solve"
//!
//! [junction]
//! a_l = 1.0
//! a_r = 2.0
//! kind = "all"          # or L, p, P, S
//!
//! [data]
//! left = [1.0, 0.0]     # (rho, q)
//! right = [1.3, -0.4160525]
//!
//! [data.L]              # per-kind override
//! left = [2.0, 1.0]
//! right = [1.55, 0.1994594]
//!
//! [output]
//! t = 0.4
//! x_min = -1.0
//! x_max = 1.0
//! samples = 201
//! ```

use std::path::Path;

use jrs_core::{CouplingKind, GasLaw64, Junction, State};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Solve,
    Stationary,
    ExistenceMap,
    Simulate,
    Audit,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Solve => "solve",
            Mode::Stationary => "stationary",
            Mode::ExistenceMap => "existence-map",
            Mode::Simulate => "simulate",
            Mode::Audit => "audit",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LawSpec {
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    #[serde(default = "one")]
    pub k: f64,
    #[serde(default = "one")]
    pub rho_ref: f64,
}

fn default_gamma() -> f64 {
    1.4
}

fn one() -> f64 {
    1.0
}

impl Default for LawSpec {
    fn default() -> Self {
        Self {
            gamma: default_gamma(),
            k: 1.0,
            rho_ref: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JunctionSpec {
    pub a_l: f64,
    pub a_r: f64,
    /// `L`, `p`, `P`, `S` or `all`.
    #[serde(default = "all_kinds")]
    pub kind: String,
}

fn all_kinds() -> String {
    "all".into()
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataPair {
    pub left: Option<[f64; 2]>,
    pub right: Option<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataSpec {
    pub left: Option<[f64; 2]>,
    pub right: Option<[f64; 2]>,
    #[serde(rename = "L")]
    pub linear_momentum: Option<DataPair>,
    #[serde(rename = "p")]
    pub equal_pressure: Option<DataPair>,
    #[serde(rename = "P")]
    pub dynamic_pressure: Option<DataPair>,
    #[serde(rename = "S")]
    pub smooth_section: Option<DataPair>,
}

impl DataSpec {
    fn overrides(&self, kind: CouplingKind) -> Option<&DataPair> {
        match kind {
            CouplingKind::LinearMomentum => self.linear_momentum.as_ref(),
            CouplingKind::EqualPressure => self.equal_pressure.as_ref(),
            CouplingKind::DynamicPressure => self.dynamic_pressure.as_ref(),
            CouplingKind::SmoothSection => self.smooth_section.as_ref(),
        }
    }

    /// Left datum for `kind` with its field path.
    pub fn left_for(&self, kind: CouplingKind) -> (Option<[f64; 2]>, String) {
        match self.overrides(kind).and_then(|o| o.left) {
            Some(v) => (Some(v), format!("data.{kind}.left")),
            None => (self.left, "data.left".into()),
        }
    }

    pub fn right_for(&self, kind: CouplingKind) -> (Option<[f64; 2]>, String) {
        match self.overrides(kind).and_then(|o| o.right) {
            Some(v) => (Some(v), format!("data.{kind}.right")),
            None => (self.right, "data.right".into()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub t: f64,
    pub x_min: f64,
    pub x_max: f64,
    pub samples: usize,
}

/// Rectangle of right data `(ρ̄_r, q̄_r)` scanned at fixed left data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapSpec {
    pub rho_min: f64,
    pub rho_max: f64,
    pub q_min: f64,
    pub q_max: f64,
    pub n_rho: usize,
    pub n_q: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimSpec {
    #[serde(default = "one")]
    pub half_length: f64,
    pub cells_per_side: usize,
    #[serde(default = "default_cfl")]
    pub cfl: f64,
    pub t_end: f64,
    /// Extra snapshot times besides `t_end`.
    #[serde(default)]
    pub snapshots: Vec<f64>,
}

fn default_cfl() -> f64 {
    jrs_core::DEFAULT_CFL
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuditSpec {
    pub samples: usize,
    pub seed: u64,
    pub section_min: f64,
    pub section_max: f64,
    pub density_min: f64,
    pub density_max: f64,
    pub max_mach: f64,
}

impl Default for AuditSpec {
    fn default() -> Self {
        let c = jrs_core::AuditConfig::default();
        Self {
            samples: c.samples,
            seed: c.seed,
            section_min: c.section_range.0,
            section_max: c.section_range.1,
            density_min: c.density_range.0,
            density_max: c.density_range.1,
            max_mach: c.max_mach,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub mode: Mode,
    #[serde(default)]
    pub law: LawSpec,
    pub junction: JunctionSpec,
    #[serde(default)]
    pub data: DataSpec,
    pub output: Option<OutputSpec>,
    pub map: Option<MapSpec>,
    pub sim: Option<SimSpec>,
    pub audit: Option<AuditSpec>,
}

const BUILTINS: [(&str, &str); 7] = [
    ("fig3", include_str!("../scenarios/fig3.toml")),
    ("fig4", include_str!("../scenarios/fig4.toml")),
    ("fig5", include_str!("../scenarios/fig5.toml")),
    ("table1", include_str!("../scenarios/table1.toml")),
    ("existence", include_str!("../scenarios/existence.toml")),
    ("fig4-fvm", include_str!("../scenarios/fig4-fvm.toml")),
    ("audit", include_str!("../scenarios/audit.toml")),
];

pub fn builtin_names() -> impl Iterator<Item = &'static str> {
    BUILTINS.iter().map(|(name, _)| *name)
}

pub fn builtin(name: &str) -> Option<Scenario> {
    BUILTINS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| Scenario::parse(text).expect("built-in scenarios are valid"))
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| CliError::Validation(format!("scenario: {e}")))
    }

    /// A built-in name, or else a path to a scenario file.
    pub fn load(name_or_path: &str) -> Result<Self> {
        if let Some(s) = builtin(name_or_path) {
            return Ok(s);
        }
        let path = Path::new(name_or_path);
        if !path.exists() {
            let names: Vec<_> = builtin_names().collect();
            return Err(CliError::Validation(format!(
                "scenario {name_or_path:?} is neither a built-in ({}) nor an existing file",
                names.join(", ")
            )));
        }
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text)
    }

    pub fn law(&self) -> Result<GasLaw64> {
        GasLaw64::new(self.law.gamma, self.law.k, self.law.rho_ref)
            .map_err(|e| CliError::validation("law", e))
    }

    pub fn kinds(&self) -> Result<Vec<CouplingKind>> {
        match self.junction.kind.as_str() {
            "all" => Ok(CouplingKind::ALL.to_vec()),
            k => k
                .parse()
                .map(|k| vec![k])
                .map_err(|e| CliError::validation("junction.kind", e)),
        }
    }

    pub fn junction(&self, kind: CouplingKind) -> Result<Junction<f64>> {
        Junction::new(self.junction.a_l, self.junction.a_r, kind)
            .map_err(|e| CliError::validation("junction", e))
    }

    fn state(
        law: &GasLaw64,
        value: Option<[f64; 2]>,
        path: &str,
        subsonic: bool,
    ) -> Result<State<f64>> {
        let [rho, q] = value.ok_or_else(|| CliError::validation(path, "missing"))?;
        let u = State::new(rho, q).map_err(|e| CliError::validation(path, e))?;
        if subsonic
            && !law
                .is_subsonic(&u)
                .map_err(|e| CliError::validation(path, e))?
        {
            return Err(CliError::validation(
                path,
                format!("state (rho={rho}, q={q}) is not subsonic"),
            ));
        }
        Ok(u)
    }

    pub fn left_state(&self, kind: CouplingKind) -> Result<State<f64>> {
        let (v, path) = self.data.left_for(kind);
        Self::state(&self.law()?, v, &path, true)
    }

    pub fn right_state(&self, kind: CouplingKind) -> Result<State<f64>> {
        let (v, path) = self.data.right_for(kind);
        Self::state(&self.law()?, v, &path, true)
    }

    /// Checks every mode-specific requirement before anything runs.
    pub fn validate(&self) -> Result<()> {
        if self.name.trim().is_empty() || self.name.contains(['/', '\\']) {
            return Err(CliError::validation(
                "name",
                "must be a non-empty file-name-safe string",
            ));
        }
        self.law()?;
        let kinds = self.kinds()?;
        for kind in &kinds {
            self.junction(*kind)?;
        }
        let finite = |path: &str, x: f64| {
            if x.is_finite() {
                Ok(())
            } else {
                Err(CliError::validation(path, "must be finite"))
            }
        };
        match self.mode {
            Mode::Solve => {
                for kind in &kinds {
                    self.left_state(*kind)?;
                    self.right_state(*kind)?;
                }
                let out = self
                    .output
                    .ok_or_else(|| CliError::validation("output", "required for mode solve"))?;
                finite("output.x_min", out.x_min)?;
                finite("output.x_max", out.x_max)?;
                if out.t <= 0.0 || !out.t.is_finite() {
                    return Err(CliError::validation("output.t", "must be positive"));
                }
                if out.x_max <= out.x_min {
                    return Err(CliError::validation(
                        "output.x_max",
                        "x-range is empty (x_max must exceed x_min)",
                    ));
                }
                if out.samples < 2 {
                    return Err(CliError::validation(
                        "output.samples",
                        "need at least 2 samples",
                    ));
                }
            }
            Mode::Stationary => {
                for kind in &kinds {
                    self.left_state(*kind)?;
                }
            }
            Mode::ExistenceMap => {
                for kind in &kinds {
                    self.left_state(*kind)?;
                }
                let m = self.map.ok_or_else(|| {
                    CliError::validation("map", "required for mode existence-map")
                })?;
                for (path, v) in [
                    ("map.rho_min", m.rho_min),
                    ("map.rho_max", m.rho_max),
                    ("map.q_min", m.q_min),
                    ("map.q_max", m.q_max),
                ] {
                    finite(path, v)?;
                }
                if !(m.rho_min > 0.0 && m.rho_max > m.rho_min) {
                    return Err(CliError::validation(
                        "map.rho_max",
                        "need 0 < rho_min < rho_max",
                    ));
                }
                if m.q_max <= m.q_min {
                    return Err(CliError::validation("map.q_max", "need q_min < q_max"));
                }
                if m.n_rho < 2 || m.n_q < 2 {
                    return Err(CliError::validation(
                        "map.n_rho",
                        "need at least 2 points per axis",
                    ));
                }
            }
            Mode::Simulate => {
                let sim = self
                    .sim
                    .as_ref()
                    .ok_or_else(|| CliError::validation("sim", "required for mode simulate"))?;
                for kind in &kinds {
                    self.sim_config(*kind).map_err(|e| match e {
                        CliError::Numeric(m) => CliError::validation("sim", m),
                        other => other,
                    })?;
                }
                for (i, t) in sim.snapshots.iter().enumerate() {
                    if !(*t > 0.0 && *t <= sim.t_end) {
                        return Err(CliError::validation(
                            &format!("sim.snapshots[{i}]"),
                            "must lie in (0, t_end]",
                        ));
                    }
                }
            }
            Mode::Audit => {
                let a = self.audit.unwrap_or_default();
                if a.samples == 0 {
                    return Err(CliError::validation("audit.samples", "must be at least 1"));
                }
                self.audit_config()
                    .map_err(|e| CliError::validation("audit", e))?;
            }
        }
        Ok(())
    }

    pub fn sim_config(&self, kind: CouplingKind) -> Result<jrs_core::SimConfig<f64>> {
        let sim = self
            .sim
            .as_ref()
            .ok_or_else(|| CliError::validation("sim", "missing"))?;
        let config = jrs_core::SimConfig {
            law: self.law()?,
            junction: self.junction(kind)?,
            half_length: sim.half_length,
            cells_per_side: sim.cells_per_side,
            cfl: sim.cfl,
            t_end: sim.t_end,
            initial: jrs_core::InitialData::Riemann {
                left: self.left_state(kind)?,
                right: self.right_state(kind)?,
            },
        };
        config
            .validate()
            .map_err(|e| CliError::validation("sim", e))?;
        Ok(config)
    }

    pub fn audit_config(&self) -> std::result::Result<jrs_core::AuditConfig, String> {
        let a = self.audit.unwrap_or_default();
        let ok = a.section_min > 0.0
            && a.section_max >= a.section_min
            && a.density_min > 0.0
            && a.density_max >= a.density_min
            && a.max_mach > 0.0
            && a.max_mach < 1.0;
        if !ok {
            return Err("need 0 < section_min ≤ section_max, 0 < density_min ≤ density_max, 0 < max_mach < 1".into());
        }
        Ok(jrs_core::AuditConfig {
            samples: a.samples,
            seed: a.seed,
            section_range: (a.section_min, a.section_max),
            density_range: (a.density_min, a.density_max),
            max_mach: a.max_mach,
            ..jrs_core::AuditConfig::default()
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_parse_and_validate() {
        for name in builtin_names() {
            let s = builtin(name).unwrap();
            assert_eq!(s.name, name);
            s.validate().unwrap_or_else(|e| panic!("{name}: {e}"));
        }
    }

    #[test]
    fn empty_x_range_is_rejected() {
        let mut s = builtin("fig3").unwrap();
        s.output.as_mut().unwrap().x_max = s.output.unwrap().x_min;
        let err = s.validate().unwrap_err();
        assert!(
            matches!(&err, CliError::Validation(m) if m.starts_with("output.x_max")),
            "{err}"
        );
    }

    #[test]
    fn supersonic_data_names_the_state() {
        let mut s = builtin("fig3").unwrap();
        s.data.right = Some([1.0, 2.0]);
        let err = s.validate().unwrap_err().to_string();
        assert!(
            err.contains("data.right") && err.contains("rho=1, q=2"),
            "{err}"
        );
    }

    #[test]
    fn per_kind_overrides_win() {
        let s = builtin("fig5").unwrap();
        assert_eq!(
            s.left_state(CouplingKind::LinearMomentum).unwrap(),
            State { rho: 2.0, q: 1.0 }
        );
        assert_eq!(
            s.left_state(CouplingKind::EqualPressure).unwrap(),
            State { rho: 1.0, q: 0.0 }
        );
    }

    #[test]
    fn unknown_fields_and_kinds_are_rejected() {
        let text = "name='x'\nmode='solve'\nbogus=1\n[junction]\na_l=1\na_r=2\n";
        assert!(Scenario::parse(text).is_err());
        let mut s = builtin("fig3").unwrap();
        s.junction.kind = "Q".into();
        assert!(s.validate().is_err());
    }
}

use std::fmt;
use std::path::{Component, Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::exact::SurdVector;
use crate::families::{FamilyMember, SemiclassicalFamily};
use crate::propagators::{GaussianObservable, TimeScale};
use crate::symbols::TorusSymbol;
use crate::window::TestWindow;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioKind {
    ZollCircle,
    TorusNonresonant,
    ResonantPair,
    EuclidDispersion,
    InvarianceResidual,
    EgorovInvariant,
    MarginalConsistency,
    OracleCrosscheck,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 8] = [
        ScenarioKind::ZollCircle,
        ScenarioKind::TorusNonresonant,
        ScenarioKind::ResonantPair,
        ScenarioKind::EuclidDispersion,
        ScenarioKind::InvarianceResidual,
        ScenarioKind::EgorovInvariant,
        ScenarioKind::MarginalConsistency,
        ScenarioKind::OracleCrosscheck,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::ZollCircle => "zoll-circle",
            ScenarioKind::TorusNonresonant => "torus-nonresonant",
            ScenarioKind::ResonantPair => "resonant-pair",
            ScenarioKind::EuclidDispersion => "euclid-dispersion",
            ScenarioKind::InvarianceResidual => "invariance-residual",
            ScenarioKind::EgorovInvariant => "egorov-invariant",
            ScenarioKind::MarginalConsistency => "marginal-consistency",
            ScenarioKind::OracleCrosscheck => "oracle-crosscheck",
        }
    }

    pub fn describe(self) -> &'static str {
        match self {
            ScenarioKind::ZollCircle => "d=1 wave packets, time-averaged pairing against the orbit average",
            ScenarioKind::TorusNonresonant => "wave packets on T^d, time-averaged pairing against the average along ξ0",
            ScenarioKind::ResonantPair => "plane-wave and tilted families on a ladder, averaged limits mu1 and mu2",
            ScenarioKind::EuclidDispersion => "free Gaussian packets on R^d at α_h = 1/h, averaged pairing against 0",
            ScenarioKind::InvarianceResidual => "averaged pairing against {a, |ξ|²/2}, expected O(1/α_h)",
            ScenarioKind::EgorovInvariant => "ξ-only symbols, pairing at each t against its t = 0 value",
            ScenarioKind::MarginalConsistency => "x-only symbols, Weyl pairing against the position density",
            ScenarioKind::OracleCrosscheck => "closed-form averaged pairing against time quadrature",
        }
    }

    /// Tolerance used when the config gives none.
    pub fn default_tolerance(self) -> f64 {
        match self {
            ScenarioKind::ZollCircle | ScenarioKind::TorusNonresonant => 2e-2,
            ScenarioKind::ResonantPair => 1e-3,
            ScenarioKind::EuclidDispersion => 1e-2,
            ScenarioKind::InvarianceResidual | ScenarioKind::EgorovInvariant | ScenarioKind::MarginalConsistency => 1e-12,
            ScenarioKind::OracleCrosscheck => 1e-6,
        }
    }

    /// Largest acceptable per-row budget when the config gives none.
    pub fn default_max_budget(self) -> Option<f64> {
        match self {
            ScenarioKind::OracleCrosscheck => Some(1e-6),
            _ => None,
        }
    }

    fn needs_window(self) -> bool {
        !matches!(self, ScenarioKind::EgorovInvariant | ScenarioKind::MarginalConsistency)
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A named symbol: a torus symbol, or a Gaussian observable on `R^d × R^d`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymbolEntry {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symbol: Option<TorusSymbol>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub observable: Option<GaussianObservable>,
}

/// Free Gaussian packets for `euclid-dispersion`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PacketParams {
    pub x0: Vec<f64>,
    pub xi0: Vec<f64>,
    pub sigma: f64,
    pub h_grid: Vec<f64>,
    /// Simpson runs on `[-horizon, horizon]`.
    pub horizon: f64,
    /// Node spacing in units of `1/α_h`.
    #[serde(default = "default_step_alpha")]
    pub step_alpha: f64,
}

fn default_step_alpha() -> f64 {
    0.02
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "kebab-case", deny_unknown_fields)]
pub enum OracleParams {
    /// One period of the evolution with the periodised window.
    #[default]
    Periodic,
    /// Composite Simpson on `[-horizon, horizon]`.
    Direct { horizon: f64, step: f64 },
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputPaths {
    #[serde(default)]
    pub csv: Option<String>,
    #[serde(default)]
    pub summary: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub schema_version: u32,
    pub scenario: ScenarioKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<SemiclassicalFamily>,
    /// Explicit `(n, h, state)` members, used when no family is given.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub states: Vec<FamilyMember>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub packet: Option<PacketParams>,
    /// Exact `ξ0` for `torus-nonresonant`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direction: Option<SurdVector>,
    pub symbols: Vec<SymbolEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<TestWindow>,
    #[serde(default = "default_scale")]
    pub time_scale: TimeScale,
    /// Times for pointwise scenarios; defaults to 100 points on `[-2, 2]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub times: Option<Vec<f64>>,
    /// Restricts the run to these member indices.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depths: Option<Vec<usize>>,
    #[serde(default)]
    pub oracle: OracleParams,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_budget: Option<f64>,
    #[serde(default)]
    pub output: OutputPaths,
}

fn default_scale() -> TimeScale {
    TimeScale::Reciprocal
}

/// Why a config was rejected.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfigError(pub Vec<String>);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, msg) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{msg}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigError {}

pub fn default_time_grid() -> Vec<f64> {
    (0..100).map(|i| -2.0 + 4.0 * i as f64 / 99.0).collect()
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let cfg: ScenarioConfig = serde_json::from_str(text).map_err(|e| ConfigError(vec![format!("parse error: {e}")]))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError(vec![format!("{}: {e}", path.display())]))?;
        Self::from_json(&text)
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance.unwrap_or_else(|| self.scenario.default_tolerance())
    }

    pub fn max_budget(&self) -> Option<f64> {
        self.max_budget.or_else(|| self.scenario.default_max_budget())
    }

    pub fn time_grid(&self) -> Vec<f64> {
        self.times.clone().unwrap_or_else(default_time_grid)
    }

    pub fn csv_path(&self, out: &Path) -> PathBuf {
        out.join(self.output.csv.clone().unwrap_or_else(|| format!("{}.csv", self.scenario)))
    }

    pub fn summary_path(&self, out: &Path) -> PathBuf {
        out.join(self.output.summary.clone().unwrap_or_else(|| format!("{}.json", self.scenario)))
    }

    /// Checks every cross-reference; collects all problems rather than the first.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let mut errs = Vec::new();
        let kind = self.scenario;
        if self.schema_version != SCHEMA_VERSION {
            errs.push(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                self.schema_version
            ));
        }
        if self.symbols.is_empty() {
            errs.push("symbol list is empty".into());
        }
        for t in [self.tolerance, self.max_budget].into_iter().flatten() {
            if !(t > 0.0 && t.is_finite()) {
                errs.push(format!("tolerances must be positive, got {t}"));
            }
        }
        if let Err(e) = self.time_scale.validate() {
            errs.push(format!("time_scale: {e}"));
        }
        if kind.needs_window() && self.window.is_none() {
            errs.push(format!("{kind} needs a window"));
        }
        if let Some(times) = &self.times {
            if times.is_empty() || times.iter().any(|t| !t.is_finite()) {
                errs.push("times must be a nonempty list of finite values".into());
            }
        }
        for name in [&self.output.csv, &self.output.summary].into_iter().flatten() {
            let p = Path::new(name);
            if name.is_empty() || p.components().any(|c| !matches!(c, Component::Normal(_))) {
                errs.push(format!("output path `{name}` must be relative to the output directory"));
            }
        }
        let mut seen = std::collections::BTreeSet::new();
        for s in &self.symbols {
            if !seen.insert(s.id.as_str()) {
                errs.push(format!("duplicate symbol id `{}`", s.id));
            }
            if s.id.is_empty() || s.id.contains([',', '"', '\n', '\r']) {
                errs.push(format!("symbol id `{}` must be nonempty and free of commas, quotes and newlines", s.id));
            }
            match (kind, &s.symbol, &s.observable) {
                (ScenarioKind::EuclidDispersion, None, Some(_)) => {}
                (ScenarioKind::EuclidDispersion, _, _) => {
                    errs.push(format!("symbol `{}`: euclid-dispersion takes an `observable` only", s.id))
                }
                (_, Some(_), None) => {}
                _ => errs.push(format!("symbol `{}`: {kind} takes a torus `symbol` only", s.id)),
            }
        }
        self.validate_source(&mut errs);
        if errs.is_empty() {
            Ok(())
        } else {
            Err(ConfigError(errs))
        }
    }

    fn validate_source(&self, errs: &mut Vec<String>) {
        let kind = self.scenario;
        let dim = match kind {
            ScenarioKind::EuclidDispersion => {
                if self.family.is_some() || !self.states.is_empty() {
                    errs.push("euclid-dispersion takes `packet`, not a family".into());
                }
                let Some(p) = &self.packet else {
                    errs.push("euclid-dispersion needs `packet`".into());
                    return;
                };
                if p.x0.is_empty() || p.x0.len() != p.xi0.len() {
                    errs.push("packet x0 and xi0 must have the same nonzero length".into());
                }
                if !(p.sigma > 0.0 && p.horizon > 0.0 && p.step_alpha > 0.0) {
                    errs.push("packet sigma, horizon and step_alpha must be positive".into());
                }
                if p.h_grid.is_empty() || p.h_grid.iter().any(|&h| !(h > 0.0 && h.is_finite())) {
                    errs.push("packet h_grid must be nonempty and positive".into());
                }
                p.x0.len()
            }
            _ => {
                if self.packet.is_some() {
                    errs.push(format!("{kind} does not take `packet`"));
                }
                match (&self.family, self.states.is_empty()) {
                    (Some(_), false) => {
                        errs.push("give either `family` or `states`, not both".into());
                        return;
                    }
                    (None, true) => {
                        errs.push(format!("{kind} needs a `family` or `states`"));
                        return;
                    }
                    (Some(f), true) => {
                        if let Err(e) = f.validate() {
                            errs.push(format!("family: {e}"));
                            return;
                        }
                        let ok = match kind {
                            ScenarioKind::ZollCircle => f.kind() == "wave-packet" && f.dim() == 1,
                            ScenarioKind::TorusNonresonant => f.kind() == "wave-packet",
                            ScenarioKind::ResonantPair => matches!(f.kind(), "plane-wave" | "resonant"),
                            _ => true,
                        };
                        if !ok {
                            errs.push(format!("family kind `{}` (d = {}) does not match {kind}", f.kind(), f.dim()));
                        }
                        if let Some(depths) = &self.depths {
                            if depths.is_empty() || depths.iter().any(|&n| n == 0 || n > f.len()) {
                                errs.push(format!("depths must lie in 1..={}", f.len()));
                            }
                        }
                        f.dim()
                    }
                    (None, false) => {
                        if matches!(
                            kind,
                            ScenarioKind::ZollCircle | ScenarioKind::TorusNonresonant | ScenarioKind::ResonantPair
                        ) {
                            errs.push(format!("{kind} needs a `family`"));
                        }
                        let d = self.states[0].state.dim();
                        for m in &self.states {
                            if m.state.dim() != d || !(m.h > 0.0 && m.h.is_finite()) {
                                errs.push(format!("state n = {}: dimensions must agree and h must be positive", m.n));
                            }
                        }
                        d
                    }
                }
            }
        };
        if kind == ScenarioKind::ResonantPair
            && !matches!(self.time_scale, TimeScale::Reciprocal)
            && !matches!(self.time_scale, TimeScale::Power { gamma } if gamma == 1.0)
        {
            errs.push("resonant-pair predictions hold at α_h = 1/h only".into());
        }
        if kind == ScenarioKind::TorusNonresonant {
            match (&self.direction, &self.family) {
                (Some(dir), Some(f)) => {
                    let carrier = f.carrier();
                    let far = dir.dim() != carrier.len()
                        || dir.to_f64().iter().zip(&carrier).any(|(a, b)| (a - b).abs() > 1e-12 * a.abs().max(1.0));
                    if far {
                        errs.push("direction must equal the family carrier ξ0".into());
                    }
                }
                (None, _) => errs.push("torus-nonresonant needs the exact `direction`".into()),
                _ => {}
            }
        }
        for s in &self.symbols {
            let sd = match (&s.symbol, &s.observable) {
                (Some(a), _) => a.dim(),
                (_, Some(o)) => o.dim(),
                _ => continue,
            };
            if sd != dim {
                errs.push(format!("symbol `{}` has dimension {sd}, members have {dim}", s.id));
            }
            if let Some(a) = &s.symbol {
                if kind == ScenarioKind::EgorovInvariant && !a.is_x_independent() {
                    errs.push(format!("symbol `{}` has l ≠ 0 terms and is not invariant", s.id));
                }
                if kind == ScenarioKind::MarginalConsistency && !a.is_xi_independent() {
                    errs.push(format!("symbol `{}` depends on ξ", s.id));
                }
            }
        }
    }
}

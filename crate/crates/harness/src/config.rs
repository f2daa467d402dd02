//! The TOML run configuration.
//!
//! ```toml
//! scenario = "constant-mass-scalar"   # mass-family-scalar | massless-dirac | u1-dirac
//! seed = 7
//!
//! [base]                # box U (× Ũ), sampled on a grid
//! lo = [-1.0]
//! hi = [1.0]
//! grid = [3]
//!
//! [fiber]               # fiber bounds and the sampling window
//! lo = -4.0
//! hi = 4.0
//! samples = 41
//!
//! [density]             # ρ(t, x) = value + Σ slope_k x_k
//! value = 1.0
//! slope = [0.0]
//!
//! [mass]                # m(x) = value + Σ slope_k x_k
//! value = 1.0
//! slope = [0.0]
//!
//! [[tests]]             # unit bumps; Dirac tests also take a component
//! centre = 0.0
//! radius = 0.1
//!
//! [tolerances]          # check name (or prefix) = tolerance
//! "models.quotient" = 1e-7
//!
//! [propagate]           # what `propagate` tabulates
//! field = 0             # test index, or `zero = true`
//! operator = "retarded" # advanced | causal
//! lo = -3.0             # proper-time range, anchored at t = 0
//! hi = 3.0
//! ```
//!
//! Missing sections take the scenario's defaults.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid config at `{path}`: {message}")]
    Invalid { path: String, message: String },
}

pub(crate) fn invalid(path: impl Into<String>, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid { path: path.into(), message: message.into() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    ConstantMassScalar,
    MassFamilyScalar,
    MasslessDirac,
    U1Dirac,
}

impl Scenario {
    pub fn is_dirac(self) -> bool {
        matches!(self, Scenario::MasslessDirac | Scenario::U1Dirac)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BaseSpec {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub grid: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiberSpec {
    pub lo: f64,
    pub hi: f64,
    #[serde(default = "default_samples")]
    pub samples: usize,
}

fn default_samples() -> usize {
    41
}

/// `value + Σ slope_k x_k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AffineSpec {
    pub value: f64,
    #[serde(default)]
    pub slope: Vec<f64>,
}

impl AffineSpec {
    pub fn eval(&self, x: &[f64]) -> f64 {
        self.value + self.slope.iter().zip(x).map(|(a, b)| a * b).sum::<f64>()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Component {
    Psi,
    PsiBar,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TestSpec {
    pub centre: f64,
    pub radius: f64,
    /// Dirac only: which component carries the bump.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub component: Option<Component>,
    /// Dirac only: a complex factor `[re, im]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phase: Option<[f64; 2]>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GreenKind {
    Retarded,
    Advanced,
    Causal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PropagateSpec {
    #[serde(default)]
    pub field: usize,
    #[serde(default)]
    pub zero: bool,
    #[serde(default = "default_green")]
    pub operator: GreenKind,
    #[serde(default = "default_lo")]
    pub lo: f64,
    #[serde(default = "default_hi")]
    pub hi: f64,
    /// Base point; defaults to the centre of the base box.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<Vec<f64>>,
}

fn default_green() -> GreenKind {
    GreenKind::Retarded
}

fn default_lo() -> f64 {
    -3.0
}

fn default_hi() -> f64 {
    3.0
}

impl Default for PropagateSpec {
    fn default() -> Self {
        Self { field: 0, zero: false, operator: default_green(), lo: default_lo(), hi: default_hi(), x: None }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<String>,
}

/// The configuration as written, with every optional section.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    scenario: Scenario,
    seed: Option<u64>,
    base: Option<BaseSpec>,
    fiber: Option<FiberSpec>,
    density: Option<AffineSpec>,
    mass: Option<AffineSpec>,
    tests: Option<Vec<TestSpec>>,
    #[serde(default)]
    tolerances: BTreeMap<String, f64>,
    #[serde(default)]
    propagate: PropagateSpec,
    #[serde(default)]
    output: OutputSpec,
}

/// A complete, validated configuration. Serialized as the report's echo.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub scenario: Scenario,
    pub seed: u64,
    pub base: BaseSpec,
    pub fiber: FiberSpec,
    pub density: AffineSpec,
    pub mass: AffineSpec,
    pub tests: Vec<TestSpec>,
    pub tolerances: BTreeMap<String, f64>,
    pub propagate: PropagateSpec,
    pub output: OutputSpec,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.display().to_string(), source })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let raw: RawConfig = toml::from_str(text)?;
        Self::resolve(raw)
    }

    /// The scenario's defaults with no overrides.
    pub fn preset(scenario: Scenario) -> Self {
        Self::resolve(RawConfig {
            scenario,
            seed: None,
            base: None,
            fiber: None,
            density: None,
            mass: None,
            tests: None,
            tolerances: BTreeMap::new(),
            propagate: PropagateSpec::default(),
            output: OutputSpec::default(),
        })
        .expect("presets are valid")
    }

    fn resolve(raw: RawConfig) -> Result<Self, ConfigError> {
        let s = raw.scenario;
        let base = raw.base.unwrap_or_else(|| match s {
            Scenario::MassFamilyScalar => BaseSpec { lo: vec![0.0, 0.5], hi: vec![1.0, 1.5], grid: vec![2, 3] },
            _ => BaseSpec { lo: vec![0.0], hi: vec![1.0], grid: vec![3] },
        });
        let dim = base.lo.len();
        let density = raw.density.unwrap_or_else(|| match s {
            Scenario::MassFamilyScalar => AffineSpec { value: 1.0, slope: vec![0.2, 0.0] },
            _ => AffineSpec { value: 1.0, slope: vec![0.2] },
        });
        let mass = raw.mass.unwrap_or_else(|| match s {
            Scenario::MassFamilyScalar => AffineSpec { value: 0.5, slope: vec![0.0, 0.5] },
            _ => AffineSpec { value: 1.0, slope: vec![] },
        });
        let tests = raw.tests.unwrap_or_else(|| {
            if s.is_dirac() {
                vec![
                    TestSpec { centre: 0.0, radius: 0.2, component: Some(Component::Psi), phase: None },
                    TestSpec { centre: 1.0, radius: 0.3, component: Some(Component::PsiBar), phase: Some([0.0, 1.0]) },
                ]
            } else {
                vec![
                    TestSpec { centre: 0.0, radius: 0.1, component: None, phase: None },
                    TestSpec { centre: 2.0, radius: 0.1, component: None, phase: None },
                ]
            }
        });
        let config = Self {
            scenario: s,
            seed: raw.seed.unwrap_or(7),
            base,
            fiber: raw.fiber.unwrap_or(FiberSpec { lo: -4.0, hi: 4.0, samples: default_samples() }),
            density,
            mass,
            tests,
            tolerances: raw.tolerances,
            propagate: raw.propagate,
            output: raw.output,
        };
        config.validate(dim)?;
        Ok(config)
    }

    fn validate(&self, dim: usize) -> Result<(), ConfigError> {
        let b = &self.base;
        if dim == 0 || b.hi.len() != dim || b.grid.len() != dim {
            return Err(invalid("base", "lo, hi and grid need the same positive length"));
        }
        for k in 0..dim {
            if !(b.lo[k] <= b.hi[k]) || b.grid[k] == 0 {
                return Err(invalid(format!("base.lo[{k}]"), "needs lo ≤ hi and a positive grid"));
            }
        }
        if self.density.slope.len() > dim {
            return Err(invalid("density.slope", format!("has more than {dim} entries")));
        }
        if self.mass.slope.len() > dim {
            return Err(invalid("mass.slope", format!("has more than {dim} entries")));
        }
        let f = &self.fiber;
        if !(f.lo < f.hi) || f.samples == 0 {
            return Err(invalid("fiber", "needs lo < hi and at least one sample"));
        }
        if self.tests.is_empty() {
            return Err(invalid("tests", "needs at least one test field"));
        }
        for (i, t) in self.tests.iter().enumerate() {
            if !(t.radius > 0.0) {
                return Err(invalid(format!("tests[{i}].radius"), "must be positive"));
            }
            if !(t.centre - t.radius > f.lo && t.centre + t.radius < f.hi) {
                return Err(invalid(format!("tests[{i}]"), "support must lie inside the fiber bounds"));
            }
            if self.scenario.is_dirac() != t.component.is_some() {
                return Err(invalid(format!("tests[{i}].component"), "is required for Dirac scenarios and not allowed otherwise"));
            }
        }
        for (name, &tol) in &self.tolerances {
            if !(tol >= 0.0) {
                return Err(invalid(format!("tolerances.{name}"), "must be a nonnegative number"));
            }
        }
        let p = &self.propagate;
        if !p.zero && p.field >= self.tests.len() {
            return Err(invalid("propagate.field", format!("no test field {} (have {})", p.field, self.tests.len())));
        }
        if !(p.lo <= p.hi) {
            return Err(invalid("propagate", "needs lo ≤ hi"));
        }
        if let Some(x) = &p.x {
            if x.len() != dim {
                return Err(invalid("propagate.x", format!("needs {dim} coordinates")));
            }
        }
        Ok(())
    }

    /// Adds `name=value` overrides from the command line.
    pub fn override_tolerances(&mut self, pairs: &[String]) -> Result<(), ConfigError> {
        for pair in pairs {
            let (name, value) = pair.split_once('=').ok_or_else(|| invalid("--tol", format!("expected name=value, got `{pair}`")))?;
            let value: f64 = value.trim().parse().map_err(|_| invalid(format!("--tol {name}"), format!("`{value}` is not a number")))?;
            if !(value >= 0.0) {
                return Err(invalid(format!("--tol {name}"), "must be a nonnegative number"));
            }
            self.tolerances.insert(name.trim().to_string(), value);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_resolve() {
        for s in [Scenario::ConstantMassScalar, Scenario::MassFamilyScalar, Scenario::MasslessDirac, Scenario::U1Dirac] {
            let c = RunConfig::preset(s);
            assert_eq!(c.scenario, s);
        }
    }

    #[test]
    fn unknown_scenario_is_rejected() {
        assert!(matches!(RunConfig::parse("scenario = \"quartic\""), Err(ConfigError::Parse(_))));
    }

    #[test]
    fn bad_fields_report_their_path() {
        let text = "scenario = \"constant-mass-scalar\"\n[[tests]]\ncentre = 0.0\nradius = -1.0\n";
        match RunConfig::parse(text) {
            Err(ConfigError::Invalid { path, .. }) => assert_eq!(path, "tests[0].radius"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn tolerance_overrides() {
        let mut c = RunConfig::preset(Scenario::ConstantMassScalar);
        c.override_tolerances(&["models.quotient=0".into()]).unwrap();
        assert_eq!(c.tolerances["models.quotient"], 0.0);
        assert!(c.override_tolerances(&["nope".into()]).is_err());
    }
}

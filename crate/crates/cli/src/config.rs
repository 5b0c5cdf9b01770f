//! TOML run configuration.
//!
//! ```toml
//! output_dir = "runs/abc"
//! seed = 7
//!
//! [solver]
//! n = 32
//! dt = 1e-3
//! t_end = 1.0
//! snapshot_stride = 100
//! diagnostic_stride = 10
//! betas = [1.0, 2.0]
//!
//! [initial]
//! kind = "abc"
//! a = 1.0
//! b = 1.0
//! c = 1.0
//!
//! [[regions]]
//! name = "core"
//! center = [3.14159, 3.14159, 3.14159]
//! top = 0.5
//! radius = 0.5
//!
//! [[criteria]]
//! kind = "kappa-beta"
//! beta = 1.0
//! gamma = 6
//! alpha = 4
//!
//! [[criteria]]
//! kind = "kappa"
//! gamma = 3
//! alpha = "inf"
//! region = "core"
//!
//! [verify]
//! checks = ["energy-balance", "holder"]
//! ```

use std::collections::BTreeSet;
use std::fmt;
use std::path::{Path, PathBuf};

use regwatch::criterion::CriterionSpec;
use regwatch::geometry::{CriterionKind, DEFAULT_DIRECTION_FLOOR};
use regwatch::norms::Region;
use regwatch::solver::{InitialCondition, SolverConfig};
use regwatch::verify::{ResidualScheme, SpaceBump, TestFunction, TimeProfile};
use regwatch::Exponent;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// An exponent written either as a number or as `"inf"`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ExponentRepr", into = "ExponentRepr")]
pub struct ExponentValue(pub Exponent<f64>);

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum ExponentRepr {
    Number(f64),
    Text(String),
}

impl TryFrom<ExponentRepr> for ExponentValue {
    type Error = String;

    fn try_from(r: ExponentRepr) -> Result<Self, String> {
        match r {
            ExponentRepr::Number(x) if x.is_infinite() && x > 0.0 => Ok(Self(Exponent::Infinity)),
            ExponentRepr::Number(x) => Ok(Self(Exponent::Finite(x))),
            ExponentRepr::Text(s) => match s.trim().to_ascii_lowercase().as_str() {
                "inf" | "infinity" | "∞" => Ok(Self(Exponent::Infinity)),
                other => other
                    .parse::<f64>()
                    .map(|x| Self(Exponent::Finite(x)))
                    .map_err(|_| format!("invalid exponent {s:?}: expected a number or \"inf\"")),
            },
        }
    }
}

impl From<ExponentValue> for ExponentRepr {
    fn from(e: ExponentValue) -> Self {
        match e.0 {
            Exponent::Finite(x) => ExponentRepr::Number(x),
            Exponent::Infinity => ExponentRepr::Text("inf".into()),
        }
    }
}

impl fmt::Display for ExponentValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

fn one() -> f64 {
    1.0
}
fn default_cfl() -> f64 {
    0.5
}
fn default_stride() -> usize {
    1
}
fn default_max_velocity() -> f64 {
    1e3
}
fn default_tail() -> f64 {
    1e-6
}
fn default_floor() -> f64 {
    DEFAULT_DIRECTION_FLOOR
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    pub n: usize,
    pub dt: f64,
    pub t_end: f64,
    #[serde(default = "one")]
    pub viscosity: f64,
    #[serde(default = "default_cfl")]
    pub cfl_limit: f64,
    #[serde(default = "default_stride")]
    pub snapshot_stride: usize,
    #[serde(default = "default_stride")]
    pub diagnostic_stride: usize,
    #[serde(default = "default_max_velocity")]
    pub max_velocity: f64,
    #[serde(default = "default_tail")]
    pub tail_fraction_limit: f64,
    #[serde(default = "default_floor")]
    pub direction_floor: f64,
    #[serde(default)]
    pub betas: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InitialSection {
    TaylorGreen {
        #[serde(default = "one")]
        amplitude: f64,
    },
    Abc {
        a: f64,
        b: f64,
        c: f64,
    },
    /// Seed falls back to the top-level `seed`.
    Random {
        slope: f64,
        #[serde(default = "one")]
        amplitude: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
    Zero,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionEntry {
    pub name: String,
    pub center: [f64; 3],
    pub top: f64,
    pub radius: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CriterionName {
    KappaBeta,
    Kappa,
    Eta,
    WeightedKappa,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CriterionEntry {
    pub kind: CriterionName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    pub gamma: ExponentValue,
    pub alpha: ExponentValue,
    /// Name of an entry in `regions`; the full slab when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub region: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckName {
    EnergyBalance,
    Holder,
    Gronwall,
    LocalEnergy,
    Smallness,
}

impl CheckName {
    pub fn as_str(self) -> &'static str {
        match self {
            CheckName::EnergyBalance => "energy-balance",
            CheckName::Holder => "holder",
            CheckName::Gronwall => "gronwall",
            CheckName::LocalEnergy => "local-energy",
            CheckName::Smallness => "smallness",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchemeName {
    Trapezoid,
    FourthOrder,
}

impl From<SchemeName> for ResidualScheme {
    fn from(s: SchemeName) -> Self {
        match s {
            SchemeName::Trapezoid => ResidualScheme::Trapezoid,
            SchemeName::FourthOrder => ResidualScheme::FourthOrder,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TestFunctionEntry {
    pub center: [f64; 3],
    pub radius: f64,
    #[serde(default = "one")]
    pub amplitude: f64,
    /// Time support; constant in time when both are absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub end: Option<f64>,
}

impl TestFunctionEntry {
    pub fn to_test_function(&self) -> CliResult<TestFunction<f64>> {
        let time = match (self.start, self.end) {
            (None, None) => TimeProfile::Constant,
            (Some(start), Some(end)) => TimeProfile::Bump { start, end },
            _ => return Err(CliError::Config("test function needs both `start` and `end`, or neither".into())),
        };
        Ok(TestFunction { space: SpaceBump { center: self.center, radius: self.radius }, time, amplitude: self.amplitude })
    }
}

fn default_energy_tol() -> f64 {
    1e-4
}
fn default_local_tol() -> f64 {
    1e-5
}
fn default_scheme() -> SchemeName {
    SchemeName::FourthOrder
}
fn default_holder_gammas() -> Vec<ExponentValue> {
    vec![
        ExponentValue(Exponent::Finite(4.0)),
        ExponentValue(Exponent::Finite(6.0)),
        ExponentValue(Exponent::Infinity),
    ]
}
fn default_oversample() -> usize {
    regwatch::verify::local_energy::DEFAULT_OVERSAMPLE
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifySection {
    #[serde(default)]
    pub checks: Vec<CheckName>,
    #[serde(default = "default_energy_tol")]
    pub energy_tolerance: f64,
    #[serde(default = "default_scheme")]
    pub energy_scheme: SchemeName,
    #[serde(default = "default_holder_gammas")]
    pub holder_gammas: Vec<ExponentValue>,
    /// Constant tested by the Gronwall check; only the calibrated minimum is reported when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gronwall_constant: Option<f64>,
    #[serde(default = "one")]
    pub smallness_epsilon: f64,
    #[serde(default = "default_local_tol")]
    pub local_energy_tolerance: f64,
    #[serde(default = "default_oversample")]
    pub local_energy_oversample: usize,
    #[serde(default)]
    pub test_functions: Vec<TestFunctionEntry>,
}

impl Default for VerifySection {
    fn default() -> Self {
        Self {
            checks: Vec::new(),
            energy_tolerance: default_energy_tol(),
            energy_scheme: default_scheme(),
            holder_gammas: default_holder_gammas(),
            gronwall_constant: None,
            smallness_epsilon: 1.0,
            local_energy_tolerance: default_local_tol(),
            local_energy_oversample: default_oversample(),
            test_functions: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
    pub solver: SolverSection,
    pub initial: InitialSection,
    #[serde(default)]
    pub regions: Vec<RegionEntry>,
    #[serde(default)]
    pub criteria: Vec<CriterionEntry>,
    #[serde(default)]
    pub verify: VerifySection,
}

impl RunConfig {
    pub fn parse(text: &str) -> CliResult<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run configuration serializes")
    }

    pub fn validate(&self) -> CliResult<()> {
        let mut names = BTreeSet::new();
        for r in &self.regions {
            if !names.insert(r.name.as_str()) {
                return Err(CliError::Config(format!("duplicate region name {:?}", r.name)));
            }
        }
        for t in &self.verify.test_functions {
            t.to_test_function()?;
        }
        if self.verify.local_energy_oversample == 0 {
            return Err(CliError::Config("verify.local_energy_oversample must be ≥ 1".into()));
        }
        self.solver_config()?.validate().map_err(|e| CliError::Config(e.to_string()))?;
        Ok(())
    }

    fn region(&self, name: &str) -> CliResult<Region<f64>> {
        self.regions
            .iter()
            .find(|r| r.name == name)
            .map(|r| Region::Cylinder { center: r.center, top: r.top, radius: r.radius })
            .ok_or_else(|| CliError::Config(format!("criterion refers to unknown region {name:?}")))
    }

    pub fn criteria(&self) -> CliResult<Vec<CriterionSpec<f64>>> {
        self.criteria
            .iter()
            .map(|c| {
                let need = |v: Option<f64>, key: &str| {
                    v.ok_or_else(|| CliError::Config(format!("criterion {:?} needs `{key}`", c.kind)))
                };
                let kind = match c.kind {
                    CriterionName::KappaBeta => CriterionKind::KappaBeta { beta: need(c.beta, "beta")? },
                    CriterionName::Kappa => CriterionKind::Kappa,
                    CriterionName::Eta => CriterionKind::Eta,
                    CriterionName::WeightedKappa => CriterionKind::WeightedKappa { b: need(c.b, "b")? },
                };
                let spec = CriterionSpec::new(kind, c.gamma.0, c.alpha.0);
                Ok(match &c.region {
                    Some(name) => spec.on(self.region(name)?),
                    None => spec,
                })
            })
            .collect()
    }

    pub fn initial_condition(&self) -> InitialCondition<f64> {
        match self.initial {
            InitialSection::TaylorGreen { amplitude } => InitialCondition::TaylorGreen { amplitude },
            InitialSection::Abc { a, b, c } => InitialCondition::Abc { a, b, c },
            InitialSection::Random { slope, amplitude, seed } => {
                InitialCondition::Random { slope, amplitude, seed: seed.unwrap_or(self.seed) }
            }
            InitialSection::Zero => InitialCondition::Zero,
        }
    }

    pub fn solver_config(&self) -> CliResult<SolverConfig<f64>> {
        let s = &self.solver;
        let mut cfg = SolverConfig::new(s.n, s.dt, s.t_end, self.initial_condition());
        cfg.viscosity = s.viscosity;
        cfg.cfl_limit = s.cfl_limit;
        cfg.snapshot_stride = s.snapshot_stride;
        cfg.diagnostic_stride = s.diagnostic_stride;
        cfg.max_velocity = s.max_velocity;
        cfg.tail_fraction_limit = s.tail_fraction_limit;
        cfg.direction_floor = s.direction_floor;
        cfg.diagnostic_betas = s.betas.clone();
        cfg.criteria = self.criteria()?;
        Ok(cfg)
    }
}

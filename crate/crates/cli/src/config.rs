use serde::Serialize;
use std::collections::BTreeMap;
use std::path::PathBuf;
use thiserror::Error;

use sasaki_spectra::legendrian::REGISTERED;

#[derive(Debug, Error)]
pub enum UsageError {
    #[error("unknown suite '{0}'")]
    Suite(String),
    #[error("unknown immersion '{0}'")]
    Immersion(String),
    #[error("unknown tolerance '{0}'")]
    Tolerance(String),
    #[error("malformed tolerance override '{0}', expected key=value")]
    Override(String),
    #[error("{0}")]
    Invalid(String),
}

pub const SUITES: [&str; 7] = [
    "sasaki-axioms",
    "legendrian-geometry",
    "moment-family",
    "nomizu-family",
    "relation",
    "spectrum",
    "all",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    SasakiAxioms,
    LegendrianGeometry,
    MomentFamily,
    NomizuFamily,
    Relation,
    Spectrum,
    All,
}

impl Suite {
    pub fn parse(name: &str) -> Result<Self, UsageError> {
        Ok(match name {
            "sasaki-axioms" => Self::SasakiAxioms,
            "legendrian-geometry" => Self::LegendrianGeometry,
            "moment-family" => Self::MomentFamily,
            "nomizu-family" => Self::NomizuFamily,
            "relation" => Self::Relation,
            "spectrum" => Self::Spectrum,
            "all" => Self::All,
            other => return Err(UsageError::Suite(other.to_string())),
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::SasakiAxioms => "sasaki-axioms",
            Self::LegendrianGeometry => "legendrian-geometry",
            Self::MomentFamily => "moment-family",
            Self::NomizuFamily => "nomizu-family",
            Self::Relation => "relation",
            Self::Spectrum => "spectrum",
            Self::All => "all",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// Which `𝔲(n+1)` generators a family suite iterates over.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Generator {
    Basis,
    Index(usize),
    /// `i·Id`, the Reeb generator.
    Reeb,
}

impl Generator {
    pub fn parse(s: &str) -> Result<Self, UsageError> {
        match s {
            "basis" => Ok(Self::Basis),
            "reeb" | "iId" => Ok(Self::Reeb),
            other => other
                .parse()
                .map(Self::Index)
                .map_err(|_| UsageError::Invalid(format!("generator '{other}': expected basis, reeb or an index"))),
        }
    }
}

/// Default thresholds, by key.
pub const DEFAULT_TOLERANCES: [(&str, f64); 22] = [
    ("axioms", 1e-7),
    ("eta-einstein", 1e-5),
    ("cone-ricci", 1e-5),
    ("cone-connection", 1e-8),
    ("legendrian", 1e-8),
    ("mean-curvature", 1e-6),
    ("second-fundamental", 1e-6),
    ("eigen-residual", 1e-6),
    ("mean-zero", 1e-8),
    ("operator", 1e-8),
    ("div-constancy", 1e-8),
    ("nabla-m", 1e-7),
    ("frame-identity", 1e-7),
    ("r-independence", 1e-9),
    ("coincidence", 1e-8),
    ("eta-integral", 1e-8),
    ("cluster", 0.02),
    ("window", 0.05),
    ("pipeline", 0.02),
    ("rayleigh", 0.01),
    ("fd-order", 1.8),
    ("fem-order", 1.5),
];

pub fn default_tolerances() -> BTreeMap<String, f64> {
    DEFAULT_TOLERANCES
        .iter()
        .map(|(k, v)| (k.to_string(), *v))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteConfig {
    pub suite: Suite,
    pub n: Option<usize>,
    pub immersion: Option<String>,
    pub resolution: Vec<usize>,
    pub generator: Generator,
    pub tolerances: BTreeMap<String, f64>,
    pub seed: u64,
    #[serde(skip)]
    pub output: Option<PathBuf>,
    pub format: Format,
}

impl SuiteConfig {
    pub fn new(suite: Suite) -> Self {
        Self {
            suite,
            n: None,
            immersion: None,
            resolution: Vec::new(),
            generator: Generator::Basis,
            tolerances: default_tolerances(),
            seed: 7,
            output: None,
            format: Format::Json,
        }
    }

    /// Applies a `key=value` override; unknown keys are rejected.
    pub fn apply_override(&mut self, arg: &str) -> Result<(), UsageError> {
        let (key, value) = arg.split_once('=').ok_or_else(|| UsageError::Override(arg.to_string()))?;
        let value: f64 = value.trim().parse().map_err(|_| UsageError::Override(arg.to_string()))?;
        if !(value.is_finite() && value > 0.0) {
            return Err(UsageError::Invalid(format!("tolerance {key} must be positive, got {value}")));
        }
        match self.tolerances.get_mut(key.trim()) {
            Some(slot) => {
                *slot = value;
                Ok(())
            }
            None => Err(UsageError::Tolerance(key.to_string())),
        }
    }

    pub fn tolerance(&self, key: &str) -> f64 {
        self.tolerances[key]
    }

    /// Name and dimension checks that must pass before any computation.
    pub fn validate(&self) -> Result<(), UsageError> {
        if let Some(name) = &self.immersion {
            if !REGISTERED.contains(&name.as_str()) {
                return Err(UsageError::Immersion(name.clone()));
            }
            let l = sasaki_spectra::legendrian::by_name(name).map_err(|e| UsageError::Invalid(e.to_string()))?;
            if let Some(n) = self.n {
                if l.n() != n {
                    return Err(UsageError::Invalid(format!("{name} has n = {}, not {n}", l.n())));
                }
            }
        }
        if let Some(n) = self.n {
            if !(1..=3).contains(&n) {
                return Err(UsageError::Invalid(format!("n = {n} outside 1..=3")));
            }
        }
        if let Generator::Index(i) = self.generator {
            let dims: Vec<usize> = match (self.n, &self.immersion) {
                (Some(n), _) => vec![n],
                (None, Some(name)) => vec![sasaki_spectra::legendrian::by_name(name)
                    .map_err(|e| UsageError::Invalid(e.to_string()))?
                    .n()],
                _ => vec![1, 2, 3],
            };
            if let Some(n) = dims.iter().find(|&&n| i >= (n + 1) * (n + 1)) {
                return Err(UsageError::Invalid(format!("generator index {i} out of range for n = {n}")));
            }
        }
        if self.resolution.contains(&0) {
            return Err(UsageError::Invalid("resolution entries must be positive".into()));
        }
        Ok(())
    }
}

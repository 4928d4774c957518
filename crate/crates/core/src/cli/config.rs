//! JSON run configurations. Unknown keys are rejected everywhere.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functions::Datum;
use crate::paths::{McConfig, Reflection, CLOCK_STEP};
use crate::problem::Problem;
use crate::symbols::BernsteinSymbol;

fn identity() -> BernsteinSymbol {
    BernsteinSymbol::identity()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub phi: BernsteinSymbol,
    #[serde(default = "identity")]
    pub psi: BernsteinSymbol,
    #[serde(default)]
    pub eta: f64,
    #[serde(default)]
    pub datum: Datum,
}

impl ProblemConfig {
    pub fn build(&self) -> Result<Problem> {
        Problem::new(self.phi.clone(), self.psi.clone(), self.eta, self.datum.build()?)
    }
}

/// Evaluation points: every t in `times` against every x in `xs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointGrid {
    pub times: Vec<f64>,
    pub xs: Vec<f64>,
}

impl PointGrid {
    pub fn validate(&self) -> Result<()> {
        if self.times.is_empty() || self.xs.is_empty() {
            return Err(Error::Config("points need at least one time and one x".into()));
        }
        if self.times.iter().any(|t| !(*t >= 0.0 && t.is_finite())) || self.xs.iter().any(|x| !(*x >= 0.0 && x.is_finite())) {
            return Err(Error::Config("times and xs must be finite and nonnegative".into()));
        }
        Ok(())
    }

    pub fn t_max(&self) -> f64 {
        self.times.iter().copied().fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct McSettings {
    pub paths: usize,
    pub dt: f64,
    pub clock_step: f64,
    pub reflection: Reflection,
    pub epsilon: Option<f64>,
}

impl Default for McSettings {
    fn default() -> Self {
        let d = McConfig::default();
        Self {
            paths: d.paths,
            dt: d.dt,
            clock_step: d.clock_step,
            reflection: d.reflection,
            epsilon: d.epsilon,
        }
    }
}

impl McSettings {
    pub fn with_seed(&self, seed: u64) -> McConfig {
        McConfig {
            paths: self.paths,
            dt: self.dt,
            clock_step: self.clock_step,
            seed,
            reflection: self.reflection,
            epsilon: self.epsilon,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimateConfig {
    pub problem: ProblemConfig,
    pub points: PointGrid,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub mc: McSettings,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSettings {
    /// Defaults to twice the effective support of the datum, at least 20.
    pub x_max: Option<f64>,
    pub hx: f64,
    /// Defaults to the largest stable step.
    pub dt: Option<f64>,
}

impl Default for GridSettings {
    fn default() -> Self {
        Self {
            x_max: None,
            hx: 0.02,
            dt: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveConfig {
    pub problem: ProblemConfig,
    pub points: PointGrid,
    #[serde(default)]
    pub grid: GridSettings,
    #[serde(default = "default_tail_tol")]
    pub tail_tol: f64,
    /// Also write the full field as a binary tabulation.
    #[serde(default)]
    pub binary: bool,
}

fn default_tail_tol() -> f64 {
    1e-6
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleConfig {
    pub problem: ProblemConfig,
    pub points: PointGrid,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BulletSettings {
    pub phi: BernsteinSymbol,
    #[serde(default = "identity")]
    pub psi: BernsteinSymbol,
    #[serde(default)]
    pub eta: f64,
    #[serde(default)]
    pub x0: f64,
    #[serde(default = "milli")]
    pub dt: f64,
    #[serde(default = "one")]
    pub horizon: f64,
    #[serde(default = "clock_step")]
    pub clock_step: f64,
    #[serde(default)]
    pub reflection: Reflection,
}

fn milli() -> f64 {
    1e-3
}

fn one() -> f64 {
    1.0
}

fn clock_step() -> f64 {
    CLOCK_STEP
}

fn default_symbols() -> Vec<BernsteinSymbol> {
    [0.5, 0.01, 0.99]
        .iter()
        .map(|&a| BernsteinSymbol::stable(a).expect("valid index"))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default = "default_symbols")]
    pub symbols: Vec<BernsteinSymbol>,
    #[serde(default = "one")]
    pub horizon: f64,
    #[serde(default = "milli")]
    pub step: f64,
    #[serde(default = "one_usize")]
    pub paths_per_symbol: usize,
    /// Levels for the inverse path run over [0, min(level_max, H_T)).
    #[serde(default = "one")]
    pub level_max: f64,
    #[serde(default = "thousand")]
    pub inverse_points: usize,
    #[serde(default)]
    pub bullet: Option<BulletSettings>,
}

fn one_usize() -> usize {
    1
}

fn thousand() -> usize {
    1000
}

/// Parses a config file, reporting the line and column of the first problem.
pub fn load<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    parse(&text).map_err(|e| match e {
        Error::Config(msg) => Error::Config(format!("{}:{msg}", path.display())),
        other => other,
    })
}

pub fn parse<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| {
        let mut msg = e.to_string();
        if let Some(i) = msg.rfind(" at line ") {
            msg.truncate(i);
        }
        Error::Config(format!("{}:{}: {msg}", e.line(), e.column()))
    })
}

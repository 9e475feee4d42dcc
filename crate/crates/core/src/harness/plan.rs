use std::fmt;
use std::path::Path;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::data::GenerationSpec;
use crate::error::HarnessError;
use crate::solvers::{ExactSolverConfig, SolverKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweptParameter {
    NUsers,
    ServerFraction,
    CapacityMean,
}

impl fmt::Display for SweptParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::NUsers => "n_users",
            Self::ServerFraction => "server_fraction",
            Self::CapacityMean => "capacity_mean",
        })
    }
}

/// Values of the parameters that are not swept.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixedValues {
    pub n_users: usize,
    pub server_fraction: f64,
    pub capacity_mean: f64,
    #[serde(default = "one")]
    pub capacity_stddev: f64,
}

fn one() -> f64 {
    1.0
}

fn twenty() -> usize {
    20
}

fn ten() -> f64 {
    10.0
}

fn yes() -> bool {
    true
}

/// One experiment: a parameter sweep, repeated over random draws, running a
/// set of solvers on each drawn scenario.
///
/// Plan files are TOML:
///
/// ```toml
/// name = "set1"
/// swept_parameter = "n_users"
/// sweep_values = [20, 40, 60]
/// repetitions = 20
/// solvers = ["exact", "greedy", "random", "vsvbp"]
/// base_seed = 2019
///
/// [fixed]
/// n_users = 100
/// server_fraction = 0.7
/// capacity_mean = 35
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentPlan {
    pub name: String,
    pub swept_parameter: SweptParameter,
    pub sweep_values: Vec<f64>,
    pub fixed: FixedValues,
    #[serde(default = "twenty")]
    pub repetitions: usize,
    pub solvers: Vec<SolverKind>,
    /// Per-run wall-clock limit of the exact solver, seconds (0 = none).
    #[serde(default = "ten")]
    pub exact_time_limit_s: f64,
    /// Per-run node limit of the exact solver (0 = none).
    #[serde(default)]
    pub exact_node_limit: u64,
    pub base_seed: u64,
    /// When false, `wall_time_ms` is written as 0 so reruns are byte-identical.
    #[serde(default = "yes")]
    pub record_wall_time: bool,
    /// Worker threads; 0 uses every core.
    #[serde(default)]
    pub workers: usize,
}

impl ExperimentPlan {
    pub fn from_toml(text: &str) -> Result<Self, HarnessError> {
        let plan: Self = toml::from_str(text).map_err(|e| HarnessError::InvalidPlan(e.to_string()))?;
        plan.validate()?;
        Ok(plan)
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io { path: path.into(), source })?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("plan serializes")
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: String| Err(HarnessError::InvalidPlan(m));
        if self.sweep_values.is_empty() {
            return bad("sweep_values is empty".into());
        }
        if self.repetitions == 0 {
            return bad("repetitions must be >= 1".into());
        }
        if self.solvers.is_empty() {
            return bad("no solvers selected".into());
        }
        if !(self.exact_time_limit_s >= 0.0 && self.exact_time_limit_s.is_finite()) {
            return bad(format!("exact_time_limit_s {} must be >= 0", self.exact_time_limit_s));
        }
        for &v in &self.sweep_values {
            let ok = match self.swept_parameter {
                SweptParameter::NUsers => v >= 1.0 && v.fract() == 0.0,
                SweptParameter::ServerFraction => v > 0.0 && v <= 1.0,
                SweptParameter::CapacityMean => v > 0.0 && v.is_finite(),
            };
            if !ok {
                return bad(format!("invalid {} value {v}", self.swept_parameter));
            }
        }
        Ok(())
    }

    pub fn exact_config(&self) -> ExactSolverConfig {
        ExactSolverConfig {
            time_limit: Duration::from_secs_f64(self.exact_time_limit_s),
            node_limit: self.exact_node_limit,
            ..ExactSolverConfig::default()
        }
    }

    /// Generation settings at one sweep point, before the per-run seed is set.
    pub fn spec_at(&self, value: f64) -> GenerationSpec {
        let f = &self.fixed;
        let mut g = GenerationSpec::standard(f.n_users, f.server_fraction, f.capacity_mean, 0);
        g.capacity_stddev = f.capacity_stddev;
        match self.swept_parameter {
            SweptParameter::NUsers => g.n_users = value as usize,
            SweptParameter::ServerFraction => g.server_fraction = value,
            SweptParameter::CapacityMean => g.capacity_mean = value,
        }
        g
    }

    pub fn max_users(&self) -> usize {
        match self.swept_parameter {
            SweptParameter::NUsers => self.sweep_values.iter().fold(0.0f64, |a, &b| a.max(b)) as usize,
            _ => self.fixed.n_users,
        }
    }

    /// Scaled-down versions of the three published experiment sets.
    pub fn desk_set(set: u8, repetitions: usize, base_seed: u64) -> Option<Self> {
        let fixed = FixedValues { n_users: 100, server_fraction: 0.7, capacity_mean: 35.0, capacity_stddev: 1.0 };
        let (name, swept_parameter, sweep_values) = match set {
            1 => ("set1", SweptParameter::NUsers, (1..=10).map(|k| 20.0 * k as f64).collect()),
            2 => ("set2", SweptParameter::ServerFraction, (1..=10).map(|k| k as f64 / 10.0).collect()),
            3 => ("set3", SweptParameter::CapacityMean, (1..=10).map(|k| 5.0 * k as f64).collect()),
            _ => return None,
        };
        Some(Self {
            name: name.into(),
            swept_parameter,
            sweep_values,
            fixed,
            repetitions,
            solvers: vec![SolverKind::Exact, SolverKind::Greedy, SolverKind::Random, SolverKind::Vsvbp],
            exact_time_limit_s: 10.0,
            exact_node_limit: 0,
            base_seed,
            record_wall_time: true,
            workers: 0,
        })
    }
}

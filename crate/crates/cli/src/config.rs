//! JSON run configuration. Parsing failures and semantic validation
//! failures both carry the JSON path of the offending value.

use std::fmt;
use std::path::{Path, PathBuf};

use pfd_core::units::{months, years};
use pfd_core::{ObservationSet, Schedule, SolverSettings, SystemSpec, TestPolicy};
use serde::{Deserialize, Serialize};

/// A configuration problem, located by its JSON path.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("config error at {path}: {reason}")]
pub struct ConfigError {
    pub path: String,
    pub reason: String,
}

impl ConfigError {
    pub fn new(path: impl Into<String>, reason: impl fmt::Display) -> Self {
        ConfigError {
            path: path.into(),
            reason: reason.to_string(),
        }
    }
}

/// A time in hours, written either as a number of hours or as a string with
/// an `h`, `mo` (730 h) or `y` (8760 h) suffix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTime", into = "f64")]
pub struct Hours(pub f64);

#[derive(Deserialize)]
#[serde(untagged)]
enum RawTime {
    Number(f64),
    Text(String),
}

impl TryFrom<RawTime> for Hours {
    type Error = String;

    fn try_from(raw: RawTime) -> Result<Self, Self::Error> {
        match raw {
            RawTime::Number(h) => Ok(Hours(h)),
            RawTime::Text(s) => parse_time(&s).map(Hours),
        }
    }
}

impl From<Hours> for f64 {
    fn from(h: Hours) -> f64 {
        h.0
    }
}

/// Parse `"2190"`, `"2190h"`, `"3mo"` or `"1y"` into hours.
pub fn parse_time(text: &str) -> Result<f64, String> {
    let s = text.trim();
    let split = s
        .find(|c: char| c.is_ascii_alphabetic() && c != 'e' && c != 'E')
        .unwrap_or(s.len());
    let (number, unit) = s.split_at(split);
    let value: f64 = number
        .trim()
        .parse()
        .map_err(|_| format!("cannot read a number from time {text:?}"))?;
    let hours = match unit.trim() {
        "" | "h" => value,
        "mo" => months(value),
        "y" => years(value),
        other => {
            return Err(format!(
                "unknown time unit {other:?} in {text:?} (expected h, mo or y)"
            ))
        }
    };
    if hours.is_finite() {
        Ok(hours)
    } else {
        Err(format!("time {text:?} is not finite"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSection {
    pub m: u32,
    pub n: u32,
    /// Dangerous undetected failure rate per component, 1/h. May be omitted
    /// when it is estimated from observations.
    pub lambda: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicySection {
    pub efficiency: Option<f64>,
    pub test_times: Vec<Hours>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObservationsSection {
    /// Failures found at each test.
    pub k: Vec<u64>,
    /// Number of components followed.
    #[serde(rename = "K", alias = "big_k")]
    pub big_k: u64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizeSection {
    /// Total number of tests including the full test; defaults to the
    /// policy's test count.
    pub n_tests: Option<usize>,
    /// Full-test interval; defaults to the policy's last test time.
    pub tau: Option<Hours>,
    #[serde(default)]
    pub settings: SolverSettings,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationSection {
    pub replications: Option<u64>,
    pub seed: Option<u64>,
    /// Curve samples per interval; 0 disables the empirical curve.
    pub curve_samples: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvaluationSection {
    /// Curve samples per interval, test instants included.
    pub curve_points: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimationSection {
    pub level: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub report: Option<PathBuf>,
    pub curve: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub system: Option<SystemSection>,
    pub policy: Option<PolicySection>,
    pub observations: Option<ObservationsSection>,
    pub optimize: Option<OptimizeSection>,
    pub simulation: Option<SimulationSection>,
    pub evaluation: Option<EvaluationSection>,
    pub estimation: Option<EstimationSection>,
    /// Lower bounds of SIL4, SIL3, SIL2 and SIL1, strictly increasing.
    pub sil_thresholds: Option<Vec<f64>>,
    pub output: Option<OutputSection>,
}

pub const DEFAULT_REPLICATIONS: u64 = 100_000;
pub const DEFAULT_CURVE_POINTS: usize = 50;

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let path = if path == "." {
                "<root>".to_owned()
            } else {
                path
            };
            ConfigError::new(path, e.into_inner())
        })
    }

    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::new("<file>", format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    fn system_section(&self) -> Result<&SystemSection, ConfigError> {
        self.system
            .as_ref()
            .ok_or_else(|| ConfigError::new("system", "section is required"))
    }

    fn policy_section(&self) -> Result<&PolicySection, ConfigError> {
        self.policy
            .as_ref()
            .ok_or_else(|| ConfigError::new("policy", "section is required"))
    }

    /// System with an explicit failure rate.
    pub fn system_spec(&self) -> Result<SystemSpec, ConfigError> {
        let lambda = self
            .system_section()?
            .lambda
            .ok_or_else(|| ConfigError::new("system.lambda", "is required"))?;
        self.system_spec_with(lambda)
    }

    /// System with the failure rate supplied by the caller.
    pub fn system_spec_with(&self, lambda: f64) -> Result<SystemSpec, ConfigError> {
        let s = self.system_section()?;
        SystemSpec::new(s.m, s.n, lambda).map_err(|e| ConfigError::new("system", e))
    }

    pub fn schedule(&self) -> Result<Schedule, ConfigError> {
        let p = self.policy_section()?;
        let times = p.test_times.iter().map(|h| h.0).collect();
        Schedule::new(times).map_err(|e| ConfigError::new("policy.test_times", e))
    }

    pub fn efficiency(&self) -> Result<f64, ConfigError> {
        let e = self
            .policy_section()?
            .efficiency
            .ok_or_else(|| ConfigError::new("policy.efficiency", "is required"))?;
        if (0.0..=1.0).contains(&e) {
            Ok(e)
        } else {
            Err(ConfigError::new(
                "policy.efficiency",
                format!("must lie in [0, 1], got {e}"),
            ))
        }
    }

    pub fn test_policy(&self) -> Result<TestPolicy, ConfigError> {
        let e = self.efficiency()?;
        TestPolicy::new(e, self.schedule()?).map_err(|e| ConfigError::new("policy", e))
    }

    pub fn observation_set(&self) -> Result<ObservationSet, ConfigError> {
        let obs = self
            .observations
            .as_ref()
            .ok_or_else(|| ConfigError::new("observations", "section is required"))?;
        let schedule = self.schedule()?;
        if obs.k.len() != schedule.len() {
            return Err(ConfigError::new(
                "observations.k",
                format!(
                    "has {} counts but the policy has {} tests",
                    obs.k.len(),
                    schedule.len()
                ),
            ));
        }
        ObservationSet::new(obs.k.clone(), obs.big_k, schedule)
            .map_err(|e| ConfigError::new("observations", e))
    }

    pub fn estimation_level(&self, flag: Option<f64>) -> Result<f64, ConfigError> {
        let (level, path) = match flag {
            Some(l) => (l, "--level"),
            None => (
                self.estimation
                    .as_ref()
                    .and_then(|e| e.level)
                    .unwrap_or(pfd_core::estimation::DEFAULT_LEVEL),
                "estimation.level",
            ),
        };
        if level > 0.0 && level < 1.0 {
            Ok(level)
        } else {
            Err(ConfigError::new(
                path,
                format!("must lie in (0, 1), got {level}"),
            ))
        }
    }

    /// `(n_tests, tau, settings)` for the optimizer.
    pub fn optimize_problem(&self) -> Result<(usize, f64, SolverSettings), ConfigError> {
        let section = self.optimize.clone().unwrap_or_default();
        let from_policy = || -> Result<Schedule, ConfigError> { self.schedule() };
        let n_tests = match section.n_tests {
            Some(n) => n,
            None => from_policy()?.len(),
        };
        if n_tests == 0 || n_tests > pfd_core::schedule::MAX_TESTS {
            return Err(ConfigError::new(
                "optimize.n_tests",
                format!(
                    "must be in 1..={}, got {n_tests}",
                    pfd_core::schedule::MAX_TESTS
                ),
            ));
        }
        let tau = match section.tau {
            Some(t) => t.0,
            None => from_policy()?.tau(),
        };
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(ConfigError::new(
                "optimize.tau",
                format!("must be positive, got {tau}"),
            ));
        }
        let s = &section.settings;
        if s.grid_budget < 2 {
            return Err(ConfigError::new(
                "optimize.settings.grid_budget",
                "must be at least 2",
            ));
        }
        if !(0.0..1.0).contains(&s.grid_offset) {
            return Err(ConfigError::new(
                "optimize.settings.grid_offset",
                "must lie in [0, 1)",
            ));
        }
        if s.u_max_resolution < 16 {
            return Err(ConfigError::new(
                "optimize.settings.u_max_resolution",
                "must be at least 16",
            ));
        }
        Ok((n_tests, tau, section.settings))
    }

    /// `(replications, seed, curve_samples)`, command-line flags taking
    /// precedence over the file.
    pub fn simulation_settings(
        &self,
        replications: Option<u64>,
        seed: Option<u64>,
    ) -> Result<(u64, u64, usize), ConfigError> {
        let section = self.simulation.clone().unwrap_or_default();
        let replications = replications
            .or(section.replications)
            .unwrap_or(DEFAULT_REPLICATIONS);
        if replications == 0 {
            return Err(ConfigError::new(
                "simulation.replications",
                "must be positive",
            ));
        }
        let seed = seed
            .or(section.seed)
            .ok_or_else(|| ConfigError::new("simulation.seed", "is required (or pass --seed)"))?;
        let samples = section.curve_samples.unwrap_or(0);
        if samples == 1 {
            return Err(ConfigError::new(
                "simulation.curve_samples",
                "must be 0 or at least 2",
            ));
        }
        Ok((replications, seed, samples))
    }

    pub fn curve_points(&self) -> Result<usize, ConfigError> {
        let points = self
            .evaluation
            .as_ref()
            .and_then(|e| e.curve_points)
            .unwrap_or(DEFAULT_CURVE_POINTS);
        if points < 2 {
            return Err(ConfigError::new(
                "evaluation.curve_points",
                "must be at least 2",
            ));
        }
        Ok(points)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn time_units_are_exact() {
        assert_eq!(parse_time("3mo").unwrap(), 2190.0);
        assert_eq!(parse_time("1y").unwrap(), 8760.0);
        assert_eq!(parse_time("4380h").unwrap(), 4380.0);
        assert_eq!(parse_time(" 6570 ").unwrap(), 6570.0);
        assert_eq!(parse_time("1.5e3h").unwrap(), 1500.0);
        assert_eq!(parse_time("0.5y").unwrap(), 4380.0);
    }

    #[test]
    fn bad_times_are_explained() {
        assert!(parse_time("3d").unwrap_err().contains("unknown time unit"));
        assert!(parse_time("mo").unwrap_err().contains("cannot read"));
    }

    #[test]
    fn parse_errors_carry_the_path() {
        let err =
            RunConfig::from_json(r#"{"policy": {"efficiency": 0.4, "test_times": ["3mo", "6x"]}}"#)
                .unwrap_err();
        assert_eq!(err.path, "policy.test_times[1]");
        let err = RunConfig::from_json(r#"{"system": {"m": 2, "n": 3, "lamda": 1}}"#).unwrap_err();
        assert_eq!(err.path, "system.lamda");
    }

    #[test]
    fn validation_errors_carry_the_path() {
        let cfg = RunConfig::from_json(
            r#"{"system": {"m": 4, "n": 3, "lambda": 1e-5},
                "policy": {"efficiency": 1.5, "test_times": [100, 50]}}"#,
        )
        .unwrap();
        assert_eq!(cfg.system_spec().unwrap_err().path, "system");
        assert_eq!(cfg.efficiency().unwrap_err().path, "policy.efficiency");
        assert_eq!(cfg.schedule().unwrap_err().path, "policy.test_times");
        assert_eq!(cfg.observation_set().unwrap_err().path, "observations");
    }

    #[test]
    fn hours_serialize_as_numbers() {
        let json = serde_json::to_string(&Hours(2190.0)).unwrap();
        assert_eq!(json, "2190.0");
    }
}

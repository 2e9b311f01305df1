//! Experiment configuration: a single flat JSON document with defaults, so
//! the effective (fully resolved) config can be echoed and re-run
//! bit-identically.

use serde::{Deserialize, Serialize};

use crate::LabError;

pub const DEFAULT_T: f64 = 1.0;
pub const DEFAULT_STEPS: usize = 1000;
pub const DEFAULT_PATHS: usize = 100_000;
pub const DEFAULT_SEED: u64 = 20240;
pub const DEFAULT_THRESHOLD: f64 = 3.0;

fn d_t() -> f64 {
    DEFAULT_T
}
fn d_steps() -> usize {
    DEFAULT_STEPS
}
fn d_paths() -> usize {
    DEFAULT_PATHS
}
fn d_seed() -> u64 {
    DEFAULT_SEED
}
fn d_threshold() -> f64 {
    DEFAULT_THRESHOLD
}
fn d_model() -> ModelSpec {
    ModelSpec {
        kind: "euclidean".into(),
        dim: Some(2),
        radius: None,
        sides: None,
    }
}

/// Manifold selection. `kind` is one of `euclidean`, `torus`, `sphere`,
/// `hyperbolic`, `sphere-x-line`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sides: Option<Vec<f64>>,
}

/// Cylinder base function selection from the built-in catalog:
/// `gaussian-bump`, `coordinate-linear`, `coordinate-quadratic`,
/// `heat-kernel`, `product-of-two`, `constant-one`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionSpec {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub times: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub width: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coeffs: Option<Vec<f64>>,
}

/// Test-function / direction profile: `ramp` (scalar `phi`, optional
/// `direction` to make it a vector profile) or `polyline` through
/// `(times[j], points[j])`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileSpec {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direction: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub times: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<Vec<f64>>>,
}

/// One batch experiment. Missing fields take the documented defaults; the
/// resolved config echoes every default explicitly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub experiment: String,
    #[serde(default = "d_model")]
    pub model: ModelSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base_point: Option<Vec<f64>>,
    #[serde(default = "d_t")]
    pub t_max: f64,
    #[serde(default = "d_steps")]
    pub steps: usize,
    #[serde(default = "d_paths")]
    pub paths: usize,
    #[serde(default = "d_seed")]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub function: Option<FunctionSpec>,
    /// Second factor for `product-of-two`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub function2: Option<FunctionSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<ProfileSpec>,
    #[serde(default = "d_threshold")]
    pub threshold: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<String>,
}

/// Experiment kinds of the batch runner.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    Simulate,
    Ibp,
    Halfway,
    Harnack,
    MatrixHarnack,
    Liyau,
    CameronMartin,
    Convexity,
    Commutator,
    ErrorNorms,
    All,
}

impl ExperimentKind {
    pub fn parse(s: &str) -> Result<Self, LabError> {
        Ok(match s {
            "simulate" => Self::Simulate,
            "ibp" => Self::Ibp,
            "halfway" => Self::Halfway,
            "harnack" => Self::Harnack,
            "matrix-harnack" => Self::MatrixHarnack,
            "liyau" => Self::Liyau,
            "cameron-martin" => Self::CameronMartin,
            "convexity" => Self::Convexity,
            "commutator" => Self::Commutator,
            "error-norms" => Self::ErrorNorms,
            "all" => Self::All,
            other => {
                return Err(LabError::Config(format!(
                    "unknown experiment '{other}' (see --list-catalog)"
                )))
            }
        })
    }

    pub fn all_kinds() -> &'static [&'static str] {
        &[
            "simulate",
            "ibp",
            "halfway",
            "harnack",
            "matrix-harnack",
            "liyau",
            "cameron-martin",
            "convexity",
            "commutator",
            "error-norms",
            "all",
        ]
    }

    /// Verification experiments need a meaningful sample size.
    pub fn is_verification(&self) -> bool {
        !matches!(self, Self::Simulate)
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, LabError> {
        serde_json::from_str(text).map_err(|e| LabError::Config(format!("bad config JSON: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Validate scalar invariants that do not need the model built.
    pub fn validate(&self) -> Result<ExperimentKind, LabError> {
        let kind = ExperimentKind::parse(&self.experiment)?;
        if !(self.t_max > 0.0) {
            return Err(LabError::Config("t_max must be positive".into()));
        }
        if self.steps < 2 {
            return Err(LabError::Config("steps must be at least 2".into()));
        }
        if kind.is_verification() && self.paths < 100 {
            return Err(LabError::Config(
                "verification experiments need at least 100 paths".into(),
            ));
        }
        if self.paths < 2 {
            return Err(LabError::Config("paths must be at least 2".into()));
        }
        if !(self.threshold > 0.0) {
            return Err(LabError::Config("threshold must be positive".into()));
        }
        Ok(kind)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_gets_defaults() {
        let c = ExperimentConfig::from_json(r#"{"experiment": "liyau"}"#).unwrap();
        assert_eq!(c.t_max, 1.0);
        assert_eq!(c.steps, 1000);
        assert_eq!(c.paths, 100_000);
        assert_eq!(c.model.kind, "euclidean");
        c.validate().unwrap();
    }

    #[test]
    fn config_round_trips_through_json() {
        let c = ExperimentConfig::from_json(
            r#"{"experiment": "ibp", "model": {"kind": "sphere", "dim": 2, "radius": 1.0},
                "paths": 5000, "seed": 9,
                "function": {"name": "gaussian-bump", "times": [0.5], "width": 0.8}}"#,
        )
        .unwrap();
        let echoed = c.to_json();
        let back = ExperimentConfig::from_json(&echoed).unwrap();
        assert_eq!(c, back);
    }

    #[test]
    fn validation_rejects_small_path_counts_for_verification() {
        let c = ExperimentConfig::from_json(r#"{"experiment": "ibp", "paths": 50}"#).unwrap();
        assert!(c.validate().is_err());
        let c = ExperimentConfig::from_json(r#"{"experiment": "simulate", "paths": 50}"#).unwrap();
        assert!(c.validate().is_ok());
    }

    #[test]
    fn unknown_experiment_is_an_error() {
        let c = ExperimentConfig::from_json(r#"{"experiment": "frobnicate"}"#).unwrap();
        assert!(c.validate().is_err());
    }
}

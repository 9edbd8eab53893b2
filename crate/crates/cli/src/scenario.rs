//! Scenario documents: one game plus optional weights, beliefs and dynamics.

use std::path::Path;

use lcg_core::dynamics::{DEFAULT_DIVERGENCE_THRESHOLD, DEFAULT_MAX_ITERS, DEFAULT_TOL};
use lcg_core::{DynamicsConfig, Family, GameSpec, Mu, UpdateRule, Weights};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// The on-disk TOML layout.
///
/// ```toml
/// family = "type2"
/// mu = 10.0
/// beta = [1.5, 1.0, 0.5]
/// tau = [3.0, 4.0, 5.0]
/// weights = [0.3333333333333333, 0.3333333333333333, 0.3333333333333334]
/// lambda = [9.0, 12.0, 15.0]
///
/// [dynamics]
/// rule = "best_response"
/// initial = [0.5, 0.5, 0.5]
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub family: Family,
    pub mu: Mu,
    pub beta: Vec<f64>,
    pub tau: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub action_bounds: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dynamics: Option<DynamicsSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DynamicsSection {
    pub rule: UpdateRule,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    pub initial: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iters: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clamp: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub divergence_threshold: Option<f64>,
}

/// A validated scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub spec: GameSpec,
    pub weights: Option<Weights>,
    pub lambda: Option<Vec<f64>>,
    pub dynamics: Option<DynamicsConfig>,
}

/// Values given on the command line; they take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub weights: Option<Vec<f64>>,
    pub lambda: Option<Vec<f64>>,
    pub epsilon: Option<f64>,
}

fn invalid(path: impl Into<String>, message: impl ToString) -> CliError {
    CliError::Config { path: path.into(), message: message.to_string() }
}

fn check_len(path: &str, values: &[f64], n: usize) -> Result<(), CliError> {
    if values.len() != n {
        return Err(invalid(path, format!("expected {n} entries, found {}", values.len())));
    }
    Ok(())
}

impl ScenarioFile {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| invalid("scenario", e.message().trim_end()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        Self::from_toml(&text).map_err(|e| match e {
            CliError::Config { path: field, message } if field == "scenario" => {
                invalid(path.display().to_string(), message)
            }
            other => other,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario fields are always representable in TOML")
    }

    pub fn apply(mut self, overrides: &Overrides) -> Self {
        if let Some(w) = &overrides.weights {
            self.weights = Some(w.clone());
        }
        if let Some(l) = &overrides.lambda {
            self.lambda = Some(l.clone());
        }
        if let (Some(eps), Some(dyn_)) = (overrides.epsilon, self.dynamics.as_mut()) {
            dyn_.epsilon = Some(eps);
        }
        self
    }

    pub fn resolve(&self) -> Result<Scenario, CliError> {
        let bounds = self
            .action_bounds
            .as_ref()
            .map(|b| b.iter().map(|[lo, hi]| (*lo, *hi)).collect());
        let spec = GameSpec::new(self.family, self.beta.clone(), self.tau.clone(), self.mu.clone(), bounds)
            .map_err(|e| invalid(spec_field(&e), e))?;
        let n = spec.n_users();

        let weights = match &self.weights {
            Some(w) => {
                check_len("weights", w, n)?;
                Some(Weights::new(w.clone()).map_err(|e| invalid("weights", e))?)
            }
            None => None,
        };

        let lambda = match &self.lambda {
            Some(l) => {
                check_len("lambda", l, n)?;
                if let Some(i) = l.iter().position(|x| !(x.is_finite() && *x > 0.0)) {
                    return Err(invalid(format!("lambda[{i}]"), format!("must be positive, got {}", l[i])));
                }
                Some(l.clone())
            }
            None => None,
        };

        let dynamics = match &self.dynamics {
            Some(d) => Some(d.resolve(n)?),
            None => None,
        };

        Ok(Scenario { spec, weights, lambda, dynamics })
    }
}

fn spec_field(e: &lcg_core::Error) -> String {
    match e {
        lcg_core::Error::InvalidParameter { field, .. } => field.clone(),
        lcg_core::Error::DimensionMismatch { what, .. } => (*what).to_string(),
        _ => "scenario".to_string(),
    }
}

impl DynamicsSection {
    fn resolve(&self, n: usize) -> Result<DynamicsConfig, CliError> {
        check_len("dynamics.initial", &self.initial, n)?;
        let mut cfg = match self.rule {
            UpdateRule::BestResponse => DynamicsConfig::best_response(self.initial.clone()),
            UpdateRule::Jacobi => {
                let eps = self
                    .epsilon
                    .ok_or_else(|| invalid("dynamics.epsilon", "required for the jacobi rule"))?;
                DynamicsConfig::jacobi(self.initial.clone(), eps)
            }
        };
        cfg = cfg
            .with_max_iters(self.max_iters.unwrap_or(DEFAULT_MAX_ITERS))
            .with_tol(self.tol.unwrap_or(DEFAULT_TOL))
            .with_divergence_threshold(self.divergence_threshold.unwrap_or(DEFAULT_DIVERGENCE_THRESHOLD));
        if let Some(clamp) = self.clamp {
            cfg = cfg.with_clamp(clamp);
        }
        cfg.validate().map_err(|e| {
            let field = match &e {
                lcg_core::Error::InvalidConfig(msg) if msg.starts_with("max_iters") => "dynamics.max_iters",
                lcg_core::Error::InvalidConfig(msg) if msg.starts_with("tol") => "dynamics.tol",
                lcg_core::Error::InvalidConfig(msg) if msg.starts_with("jacobi") => "dynamics.epsilon",
                lcg_core::Error::InvalidConfig(msg) if msg.starts_with("divergence") => {
                    "dynamics.divergence_threshold"
                }
                _ => "dynamics.initial",
            };
            invalid(field, e)
        })?;
        Ok(cfg)
    }
}

impl Scenario {
    /// The fully explicit document for this scenario, bounds and defaults
    /// filled in.
    pub fn to_file(&self) -> ScenarioFile {
        let spec = &self.spec;
        ScenarioFile {
            family: spec.family(),
            mu: spec.mu().clone(),
            beta: spec.beta().to_vec(),
            tau: spec.tau().to_vec(),
            action_bounds: Some(
                spec.action_lower()
                    .iter()
                    .zip(spec.action_upper())
                    .map(|(lo, hi)| [*lo, *hi])
                    .collect(),
            ),
            weights: self.weights.as_ref().map(|w| w.as_slice().to_vec()),
            lambda: self.lambda.clone(),
            dynamics: self.dynamics.as_ref().map(|d| DynamicsSection {
                rule: d.rule,
                epsilon: (d.rule == UpdateRule::Jacobi).then_some(d.epsilon),
                initial: d.initial.to_vec(),
                max_iters: Some(d.max_iters),
                tol: Some(d.tol),
                clamp: Some(d.clamp),
                divergence_threshold: Some(d.divergence_threshold),
            }),
        }
    }

    pub fn require_weights(&self) -> Result<&Weights, CliError> {
        self.weights
            .as_ref()
            .ok_or_else(|| invalid("weights", "missing field `weights` (set it in the scenario or pass --weights)"))
    }

    pub fn require_lambda(&self) -> Result<&[f64], CliError> {
        self.lambda
            .as_deref()
            .ok_or_else(|| invalid("lambda", "missing field `lambda` (set it in the scenario or pass --lambda)"))
    }

    pub fn require_dynamics(&self) -> Result<&DynamicsConfig, CliError> {
        self.dynamics
            .as_ref()
            .ok_or_else(|| invalid("dynamics", "missing table `dynamics`"))
    }
}

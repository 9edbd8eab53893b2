//! Best-response and Jacobi belief dynamics with spectral stability verdicts.
//!
//! At stage `t` user `n` sets its reference points to the previous stage's
//! state and action, then maximizes its conjectured utility. Substituting the
//! reference update into the conjectured optimum gives the best-response map
//!
//! ```text
//! B_n(a) = β_n (μ − Σ_{m≠n} τ_m a_m) / (λ_n (1+β_n)) + β_n (λ_n − τ_n) a_n / (λ_n (1+β_n))
//! ```
//!
//! Jacobi dynamics move a fraction `ε` of the way towards `B(a)`. All users
//! update simultaneously from the previous profile.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{evaluate, ActionProfile, GameSpec, StateVector, UtilityVector};
use crate::numerics::{br_jacobian_spectrum, check_lambda, convergence_indicator, SpectrumResult};

pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_MAX_ITERS: usize = 100_000;
pub const DEFAULT_DIVERGENCE_THRESHOLD: f64 = 1e9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UpdateRule {
    BestResponse,
    Jacobi,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DynamicsConfig {
    pub rule: UpdateRule,
    /// Jacobi stepsize; ignored by best response.
    pub epsilon: f64,
    pub initial: ActionProfile,
    pub max_iters: usize,
    pub tol: f64,
    pub divergence_threshold: f64,
    /// Project each iterate onto the action box.
    pub clamp: bool,
}

impl DynamicsConfig {
    pub fn best_response(initial: impl Into<ActionProfile>) -> Self {
        DynamicsConfig {
            rule: UpdateRule::BestResponse,
            epsilon: 1.0,
            initial: initial.into(),
            max_iters: DEFAULT_MAX_ITERS,
            tol: DEFAULT_TOL,
            divergence_threshold: DEFAULT_DIVERGENCE_THRESHOLD,
            clamp: true,
        }
    }

    pub fn jacobi(initial: impl Into<ActionProfile>, epsilon: f64) -> Self {
        DynamicsConfig {
            rule: UpdateRule::Jacobi,
            epsilon,
            ..DynamicsConfig::best_response(initial)
        }
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_max_iters(mut self, max_iters: usize) -> Self {
        self.max_iters = max_iters;
        self
    }

    pub fn with_clamp(mut self, clamp: bool) -> Self {
        self.clamp = clamp;
        self
    }

    pub fn with_divergence_threshold(mut self, threshold: f64) -> Self {
        self.divergence_threshold = threshold;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::InvalidConfig(format!("tol must be positive, got {}", self.tol)));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidConfig("max_iters must be at least 1".into()));
        }
        if !(self.divergence_threshold > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "divergence_threshold must be positive, got {}",
                self.divergence_threshold
            )));
        }
        if self.rule == UpdateRule::Jacobi && !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "jacobi epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        if let Some(x) = self.initial.iter().find(|x| !x.is_finite()) {
            return Err(Error::InvalidConfig(format!("initial action {x} is not finite")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub t: usize,
    pub a: ActionProfile,
    pub s: StateVector,
    pub u: UtilityVector,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Outcome {
    Converged { iterations: usize },
    MaxItersReached,
    Diverged,
}

impl Outcome {
    pub fn is_converged(&self) -> bool {
        matches!(self, Outcome::Converged { .. })
    }
}

/// Iterates from `t = 0` (the initial profile) onward.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub records: Vec<Record>,
    pub outcome: Outcome,
}

impl Trajectory {
    pub fn final_actions(&self) -> &ActionProfile {
        &self.records.last().expect("a trajectory holds its initial profile").a
    }

    /// First iteration index whose profile lies within `radius` of `point`.
    pub fn first_within(&self, point: &[f64], radius: f64) -> Option<usize> {
        self.records
            .iter()
            .find(|r| r.a.max_distance(point) < radius)
            .map(|r| r.t)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub spectrum: SpectrumResult,
    /// `Σ τ_n β_n / (λ_n (1 + 2β_n))`
    pub condition_value: f64,
    pub br_converges: bool,
    /// Jacobi dynamics converge for every stepsize below `2 / (1 − min ξ)`.
    pub jacobi_epsilon_bound: f64,
}

/// One simultaneous best-response step.
pub fn best_response_map(spec: &GameSpec, lambda: &[f64], a_prev: &ActionProfile) -> Result<ActionProfile> {
    let mu = spec.require_type2()?;
    check_lambda(spec, lambda)?;
    spec.check_dim("action profile", a_prev.len())?;
    let (beta, tau) = (spec.beta(), spec.tau());
    let load: f64 = tau.iter().zip(a_prev.iter()).map(|(t, a)| t * a).sum();
    Ok(ActionProfile(
        (0..spec.n_users())
            .map(|n| {
                let others = load - tau[n] * a_prev[n];
                let scale = beta[n] / (lambda[n] * (1.0 + beta[n]));
                scale * (mu - others) + scale * (lambda[n] - tau[n]) * a_prev[n]
            })
            .collect(),
    ))
}

/// One Jacobi step `a + ε (B(a) − a)`.
pub fn jacobi_map(spec: &GameSpec, lambda: &[f64], a_prev: &ActionProfile, epsilon: f64) -> Result<ActionProfile> {
    let target = best_response_map(spec, lambda, a_prev)?;
    Ok(ActionProfile(
        a_prev
            .iter()
            .zip(target.iter())
            .map(|(a, b)| a + epsilon * (b - a))
            .collect(),
    ))
}

fn record(spec: &GameSpec, t: usize, a: ActionProfile) -> Result<Record> {
    let (s, u) = evaluate(spec, &a)?;
    Ok(Record { t, a, s, u })
}

/// Runs the configured dynamics until convergence, divergence or the iteration cap.
pub fn run_dynamics(spec: &GameSpec, lambda: &[f64], cfg: &DynamicsConfig) -> Result<Trajectory> {
    spec.require_type2()?;
    check_lambda(spec, lambda)?;
    spec.check_dim("initial profile", cfg.initial.len())?;
    cfg.validate()?;

    let mut current = cfg.initial.clone();
    let mut records = vec![record(spec, 0, current.clone())?];
    let mut outcome = Outcome::MaxItersReached;

    for t in 1..=cfg.max_iters {
        let mut next = match cfg.rule {
            UpdateRule::BestResponse => best_response_map(spec, lambda, &current)?,
            UpdateRule::Jacobi => jacobi_map(spec, lambda, &current, cfg.epsilon)?,
        };
        if cfg.clamp {
            next = spec.clamp(&next);
        }
        let size = next.iter().map(|x| x.abs()).fold(0.0, f64::max);
        let step = next.max_distance(&current);
        records.push(record(spec, t, next.clone())?);

        if !size.is_finite() || size > cfg.divergence_threshold {
            outcome = Outcome::Diverged;
            break;
        }
        if step < cfg.tol {
            outcome = Outcome::Converged { iterations: t };
            break;
        }
        current = next;
    }
    Ok(Trajectory { records, outcome })
}

/// Spectral convergence verdict for best-response and Jacobi dynamics.
pub fn stability_analysis(spec: &GameSpec, lambda: &[f64]) -> Result<StabilityReport> {
    let spectrum = br_jacobian_spectrum(spec, lambda)?;
    let condition_value = convergence_indicator(spec, lambda)?;
    let jacobi_epsilon_bound = 2.0 / (1.0 - spectrum.min_eigenvalue());
    Ok(StabilityReport {
        spectrum,
        condition_value,
        br_converges: condition_value < 1.0,
        jacobi_epsilon_bound,
    })
}

/// Spectrum of the Jacobi map: each best-response eigenvalue `ξ` becomes `1 − ε + εξ`.
pub fn jacobi_spectrum_shift(spectrum: &SpectrumResult, epsilon: f64) -> Result<SpectrumResult> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidConfig(format!("jacobi epsilon must be positive, got {epsilon}")));
    }
    Ok(SpectrumResult::from_eigenvalues(
        spectrum
            .eigenvalues
            .iter()
            .map(|xi| 1.0 - epsilon + epsilon * xi)
            .collect(),
        spectrum.q_at_minus_one,
    ))
}

//! Linear beliefs and conjectural equilibria of Type II games.
//!
//! User `n` believes its state responds to its own action as
//! `s̃_n(a_n) = s̄_n − λ_n (a_n − ā_n)`. A conjectural equilibrium is a joint
//! action at which every believed state is realized and every user maximizes
//! `a_n^β_n · s̃_n(a_n)`.

use serde::{Deserialize, Serialize};

use crate::equilibria::{
    check_agreement, check_in_bounds, pareto_type2, reject_zero_weights, relative_residual,
    weighted_log_ratio, EquilibriumKind, EquilibriumResult,
};
use crate::error::{Error, Result};
use crate::model::{evaluate, ActionProfile, GameSpec, Weights};
use crate::numerics::{check_lambda, LinearSystem};

/// Tolerance on `Σ τ_n/λ_n = 1` for flagging a Pareto-optimal belief profile.
pub const PARETO_TOTAL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeliefConfig {
    pub lambda: Vec<f64>,
    pub s_ref: Vec<f64>,
    pub a_ref: Vec<f64>,
}

impl BeliefConfig {
    pub fn new(lambda: Vec<f64>, s_ref: Vec<f64>, a_ref: Vec<f64>) -> Result<Self> {
        let n = lambda.len();
        for (what, v) in [("s_ref", &s_ref), ("a_ref", &a_ref)] {
            if v.len() != n {
                return Err(Error::DimensionMismatch {
                    what,
                    expected: n,
                    actual: v.len(),
                });
            }
        }
        for (i, l) in lambda.iter().enumerate() {
            if !(l.is_finite() && *l > 0.0) {
                return Err(Error::param(format!("lambda[{i}]"), format!("must be positive, got {l}")));
            }
        }
        if let Some(i) = a_ref.iter().position(|a| !(*a >= 0.0)) {
            return Err(Error::param(format!("a_ref[{i}]"), "must be nonnegative"));
        }
        Ok(BeliefConfig { lambda, s_ref, a_ref })
    }

    /// State user `n` expects after playing `action`.
    pub fn believed_state(&self, n: usize, action: f64) -> f64 {
        self.s_ref[n] - self.lambda[n] * (action - self.a_ref[n])
    }
}

/// Per-user conservativeness `τ_n/λ_n` and its total.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConservativenessProfile {
    pub c: Vec<f64>,
    pub total: f64,
}

impl ConservativenessProfile {
    /// Beliefs with total conservativeness one lead to a Pareto-optimal CE.
    pub fn is_pareto(&self) -> bool {
        (self.total - 1.0).abs() < PARETO_TOTAL_TOL
    }
}

/// Unconstrained maximizer of user `n`'s conjectured utility
/// `a^β_n (s̄_n − λ_n (a − ā_n))`. Callers clamp to the action bounds.
pub fn conjectured_best_action(spec: &GameSpec, n: usize, belief: &BeliefConfig) -> Result<f64> {
    spec.require_type2()?;
    spec.check_dim("beliefs", belief.lambda.len())?;
    if n >= spec.n_users() {
        return Err(Error::param("user", format!("index {n} out of range for {} users", spec.n_users())));
    }
    let (b, l) = (spec.beta()[n], belief.lambda[n]);
    Ok(b * (belief.s_ref[n] + l * belief.a_ref[n]) / (l * (1.0 + b)))
}

/// Steady-state conditions `(λ_n + β_n τ_n) a_n + β_n Σ_{m≠n} τ_m a_m = β_n μ`.
pub fn ce_system(spec: &GameSpec, lambda: &[f64]) -> Result<LinearSystem> {
    let mu = spec.require_type2()?;
    check_lambda(spec, lambda)?;
    let (beta, tau) = (spec.beta(), spec.tau());
    let n = spec.n_users();
    let matrix = (0..n)
        .map(|i| {
            (0..n)
                .map(|m| {
                    let off = beta[i] * tau[m];
                    if m == i {
                        lambda[i] + off
                    } else {
                        off
                    }
                })
                .collect()
        })
        .collect();
    LinearSystem::new(matrix, beta.iter().map(|b| b * mu).collect())
}

fn ce_actions(spec: &GameSpec, mu: f64, lambda: &[f64]) -> Vec<f64> {
    let (beta, tau) = (spec.beta(), spec.tau());
    let denom = 1.0
        + tau
            .iter()
            .zip(beta)
            .zip(lambda)
            .map(|((t, b), l)| t * b / l)
            .sum::<f64>();
    beta.iter().zip(lambda).map(|(b, l)| b * mu / (l * denom)).collect()
}

/// Conjectural equilibrium `a_n = β_n μ / (λ_n (1 + Σ τ_m β_m / λ_m))` reached
/// by users with belief slopes `λ`.
pub fn ce_closed_form(spec: &GameSpec, lambda: &[f64]) -> Result<EquilibriumResult> {
    let mu = spec.require_type2()?;
    let system = ce_system(spec, lambda)?;
    let actions = ce_actions(spec, mu, lambda);
    check_in_bounds(spec, EquilibriumKind::Conjectural, &actions)?;
    let residual = relative_residual(&system, &actions);
    let actions = ActionProfile(actions);
    let (_, utilities) = evaluate(spec, &actions)?;
    Ok(EquilibriumResult {
        kind: EquilibriumKind::Conjectural,
        actions,
        utilities,
        weights_used: None,
        residual,
    })
}

/// Beliefs under which `target` is a conjectural equilibrium:
/// `λ_n = β_n s / a_n` with reference points `(s̄_n, ā_n) = (s(target), a_n)`.
pub fn beliefs_for_target(spec: &GameSpec, target: &ActionProfile) -> Result<BeliefConfig> {
    spec.require_type2()?;
    spec.check_dim("target", target.len())?;
    let state = spec.states(target)[0];
    for (user, a) in target.iter().enumerate() {
        if !(*a > 0.0 && a.is_finite()) {
            return Err(Error::InvalidTarget {
                user,
                reason: format!("action must be strictly positive, got {a}"),
            });
        }
        if !(state > 0.0) {
            return Err(Error::InvalidTarget {
                user,
                reason: format!("state at the target must be positive, got {state}"),
            });
        }
    }
    let lambda = spec.beta().iter().zip(target.iter()).map(|(b, a)| b * state / a).collect();
    BeliefConfig::new(lambda, vec![state; spec.n_users()], target.to_vec())
}

pub fn conservativeness(spec: &GameSpec, lambda: &[f64]) -> Result<ConservativenessProfile> {
    spec.require_type2()?;
    check_lambda(spec, lambda)?;
    let c: Vec<f64> = spec.tau().iter().zip(lambda).map(|(t, l)| t / l).collect();
    let total = c.iter().sum();
    Ok(ConservativenessProfile { c, total })
}

/// `Σ ω_n log[u_n(a^CE)/u_n(a^PB)]`, computed in closed form and checked
/// against evaluated utilities. Never positive; zero iff `ω_n = τ_n/λ_n`.
pub fn ce_vs_pareto_gap(spec: &GameSpec, lambda: &[f64], w: &Weights) -> Result<f64> {
    spec.require_type2()?;
    check_lambda(spec, lambda)?;
    spec.check_dim("weights", w.len())?;
    reject_zero_weights(w)?;
    let (beta, tau) = (spec.beta(), spec.tau());

    let sum_wb: f64 = w.iter().zip(beta).map(|(w, b)| w * b).sum();
    let sum_tbl: f64 = tau.iter().zip(beta).zip(lambda).map(|((t, b), l)| t * b / l).sum();
    let closed = (0..spec.n_users())
        .map(|n| {
            w[n] * beta[n] * (tau[n] * (1.0 + sum_wb) / (lambda[n] * w[n] * (1.0 + sum_tbl))).ln()
        })
        .sum::<f64>()
        + ((1.0 + sum_wb) / (1.0 + sum_tbl)).ln();

    let ce = ce_closed_form(spec, lambda)?;
    let pb = pareto_type2(spec, w)?;
    let evaluated = weighted_log_ratio(w, &ce.utilities, &pb.utilities);
    check_agreement("CE-vs-Pareto gap", closed, evaluated)?;
    Ok(closed)
}

/// `Σ τ_n (u'_n − u*_n) / (λ_n u*_n)`, the proportional-fairness functional of
/// `u'` at the reference utilities `u*`.
pub fn fairness_functional(spec: &GameSpec, lambda: &[f64], u_star: &[f64], u_prime: &[f64]) -> Result<f64> {
    check_lambda(spec, lambda)?;
    spec.check_dim("reference utilities", u_star.len())?;
    spec.check_dim("utilities", u_prime.len())?;
    Ok(spec
        .tau()
        .iter()
        .zip(lambda)
        .zip(u_star.iter().zip(u_prime))
        .map(|((t, l), (us, up))| t * (up - us) / (l * us))
        .sum())
}

/// `Σ (τ_n/λ_n) log(u'_n / u*_n)`, the log-domain counterpart of
/// [`fairness_functional`].
pub fn log_fairness_functional(spec: &GameSpec, lambda: &[f64], u_star: &[f64], u_prime: &[f64]) -> Result<f64> {
    check_lambda(spec, lambda)?;
    spec.check_dim("reference utilities", u_star.len())?;
    spec.check_dim("utilities", u_prime.len())?;
    let w: Vec<f64> = spec.tau().iter().zip(lambda).map(|(t, l)| t / l).collect();
    Ok(weighted_log_ratio(&w, u_prime, u_star))
}

//! Nash equilibria, Pareto-boundary points and the price of anarchy.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{evaluate, ActionProfile, Family, GameSpec, UtilityVector, Weights};
use crate::numerics::{solve_linear, LinearSystem};

/// Largest first-order residual tolerated on a closed-form equilibrium.
pub const RESIDUAL_TOL: f64 = 1e-8;
/// Agreement required between closed-form and evaluated log-utility gaps.
pub const GAP_AGREEMENT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EquilibriumKind {
    Nash,
    ParetoPoint,
    Conjectural,
}

impl EquilibriumKind {
    pub(crate) fn label(self) -> &'static str {
        match self {
            EquilibriumKind::Nash => "Nash",
            EquilibriumKind::ParetoPoint => "Pareto",
            EquilibriumKind::Conjectural => "conjectural",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumResult {
    pub kind: EquilibriumKind,
    pub actions: ActionProfile,
    pub utilities: UtilityVector,
    pub weights_used: Option<Weights>,
    /// `‖A a − b‖_∞ / (1 + ‖b‖_∞)` for the first-order linear system `A a = b`.
    pub residual: f64,
}

/// Gap between Nash and Pareto weighted log-utilities with its analytic bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoAReport {
    /// `Σ ω_n log[u_n(a^NE) / u_n(a^PB)]` from the closed form.
    pub gap: f64,
    /// The same quantity from evaluated utilities.
    pub gap_from_utilities: f64,
    pub lower_bound: f64,
    pub upper_bound: f64,
}

pub(crate) fn relative_residual(sys: &LinearSystem, x: &[f64]) -> f64 {
    let scale = sys.rhs().iter().map(|b| b.abs()).fold(0.0, f64::max);
    sys.residual(x) / (1.0 + scale)
}

pub(crate) fn check_in_bounds(spec: &GameSpec, kind: EquilibriumKind, a: &[f64]) -> Result<()> {
    for (user, x) in a.iter().enumerate() {
        let (lower, upper) = spec.bounds(user);
        if !(*x >= lower && *x <= upper) {
            return Err(Error::OutOfBounds {
                kind: kind.label(),
                user,
                value: *x,
                lower,
                upper,
            });
        }
    }
    Ok(())
}

fn finish(
    spec: &GameSpec,
    kind: EquilibriumKind,
    actions: Vec<f64>,
    weights: Option<&Weights>,
    system: Option<&LinearSystem>,
) -> Result<EquilibriumResult> {
    check_in_bounds(spec, kind, &actions)?;
    let residual = system.map_or(0.0, |sys| relative_residual(sys, &actions));
    let actions = ActionProfile(actions);
    let (_, utilities) = evaluate(spec, &actions)?;
    Ok(EquilibriumResult {
        kind,
        actions,
        utilities,
        weights_used: weights.cloned(),
        residual,
    })
}

/// Coupled first-order system `(1+c_n)τ_n a_n + c_n Σ_{m≠n} τ_m a_m = c_n μ`.
fn coupled_system(spec: &GameSpec, coeff: &[f64]) -> Result<LinearSystem> {
    let mu = spec.require_type2()?;
    let tau = spec.tau();
    let n = spec.n_users();
    let matrix = (0..n)
        .map(|i| {
            (0..n)
                .map(|m| if m == i { (1.0 + coeff[i]) * tau[m] } else { coeff[i] * tau[m] })
                .collect()
        })
        .collect();
    LinearSystem::new(matrix, coeff.iter().map(|c| c * mu).collect())
}

/// First-order conditions of the Nash equilibrium of a Type II game.
pub fn nash_system(spec: &GameSpec) -> Result<LinearSystem> {
    coupled_system(spec, spec.beta())
}

/// First-order conditions of the weighted proportional-fair optimum of a Type II game.
pub fn pareto_system(spec: &GameSpec, w: &Weights) -> Result<LinearSystem> {
    spec.check_dim("weights", w.len())?;
    let coeff: Vec<f64> = w.iter().zip(spec.beta()).map(|(w, b)| w * b).collect();
    coupled_system(spec, &coeff)
}

/// Closed-form Nash equilibrium `a_n = β_n μ / (τ_n (1 + Σ β_m))`.
pub fn nash_type2(spec: &GameSpec) -> Result<EquilibriumResult> {
    let mu = spec.require_type2()?;
    let denom = 1.0 + spec.beta().iter().sum::<f64>();
    let actions = spec
        .beta()
        .iter()
        .zip(spec.tau())
        .map(|(b, t)| b * mu / (t * denom))
        .collect();
    finish(spec, EquilibriumKind::Nash, actions, None, Some(&nash_system(spec)?))
}

/// Type I states do not depend on the user's own action, so each utility is
/// increasing in it and the Nash equilibrium sits at the upper bounds.
pub fn nash_type1(spec: &GameSpec) -> Result<EquilibriumResult> {
    spec.require_type1()?;
    finish(spec, EquilibriumKind::Nash, spec.action_upper().to_vec(), None, None)
}

pub fn nash(spec: &GameSpec) -> Result<EquilibriumResult> {
    match spec.family() {
        Family::TypeI => nash_type1(spec),
        Family::TypeII => nash_type2(spec),
    }
}

/// Closed-form Pareto point `a_n = ω_n β_n μ / (τ_n (1 + Σ ω_m β_m))`.
///
/// A zero weight yields a zero action and utility for that user.
pub fn pareto_type2(spec: &GameSpec, w: &Weights) -> Result<EquilibriumResult> {
    let mu = spec.require_type2()?;
    let system = pareto_system(spec, w)?;
    let denom = 1.0 + w.iter().zip(spec.beta()).map(|(w, b)| w * b).sum::<f64>();
    let actions = spec
        .beta()
        .iter()
        .zip(spec.tau())
        .zip(w.iter())
        .map(|((b, t), w)| w * b * mu / (t * denom))
        .collect();
    finish(spec, EquilibriumKind::ParetoPoint, actions, Some(w), Some(&system))
}

/// Linear system behind the Type I Pareto point.
///
/// With `ψ_m(a) = −(μ_m − τ_m a_m)/τ_m`, the condition
/// `β_m ω_m ψ_m(a) + (1 − ω_m) a_m = 0` is diagonal in `a`.
pub fn pareto_type1_system(spec: &GameSpec, w: &Weights) -> Result<LinearSystem> {
    let mu = spec.require_type1()?;
    spec.check_dim("weights", w.len())?;
    let (beta, tau) = (spec.beta(), spec.tau());
    let n = spec.n_users();
    let matrix = (0..n)
        .map(|i| {
            let mut row = vec![0.0; n];
            row[i] = beta[i] * w[i] + 1.0 - w[i];
            row
        })
        .collect();
    let rhs = (0..n).map(|i| beta[i] * w[i] * mu[i] / tau[i]).collect();
    LinearSystem::new(matrix, rhs)
}

/// Pareto point of a Type I game for strictly positive weights.
pub fn pareto_type1(spec: &GameSpec, w: &Weights) -> Result<EquilibriumResult> {
    spec.require_type1()?;
    if let Some(user) = w.first_zero() {
        return Err(Error::ZeroWeight { user });
    }
    let system = pareto_type1_system(spec, w)?;
    let actions = solve_linear(&system)?;
    finish(spec, EquilibriumKind::ParetoPoint, actions, Some(w), Some(&system))
}

pub fn pareto(spec: &GameSpec, w: &Weights) -> Result<EquilibriumResult> {
    match spec.family() {
        Family::TypeI => pareto_type1(spec, w),
        Family::TypeII => pareto_type2(spec, w),
    }
}

/// `Σ ω_n log u_n(a)` with the convention `0 · log 0 = 0`.
pub fn weighted_log_utility(spec: &GameSpec, w: &Weights, a: &ActionProfile) -> Result<f64> {
    spec.check_dim("weights", w.len())?;
    let (_, u) = evaluate(spec, a)?;
    Ok(w
        .iter()
        .zip(u.iter())
        .map(|(w, u)| if *w == 0.0 { 0.0 } else { w * u.ln() })
        .sum())
}

/// `Σ ω_n log(u_n / v_n)`
pub(crate) fn weighted_log_ratio(w: &[f64], u: &[f64], v: &[f64]) -> f64 {
    w.iter().zip(u.iter().zip(v)).map(|(w, (u, v))| w * (u / v).ln()).sum()
}

pub(crate) fn check_agreement(what: &'static str, closed_form: f64, evaluated: f64) -> Result<()> {
    if (closed_form - evaluated).abs() > GAP_AGREEMENT_TOL * (1.0 + closed_form.abs()) {
        return Err(Error::Inconsistent {
            what,
            closed_form,
            evaluated,
        });
    }
    Ok(())
}

pub(crate) fn reject_zero_weights(w: &Weights) -> Result<()> {
    match w.first_zero() {
        Some(user) => Err(Error::ZeroWeight { user }),
        None => Ok(()),
    }
}

/// Efficiency loss of the Nash equilibrium relative to the `ω`-weighted
/// proportional-fair point, with its analytic bounds.
pub fn price_of_anarchy(spec: &GameSpec, w: &Weights) -> Result<PoAReport> {
    spec.require_type2()?;
    spec.check_dim("weights", w.len())?;
    reject_zero_weights(w)?;
    let beta = spec.beta();

    let sum_b: f64 = beta.iter().sum();
    let sum_wb: f64 = w.iter().zip(beta).map(|(w, b)| w * b).sum();
    let sum_w2b: f64 = w.iter().zip(beta).map(|(w, b)| w * w * b).sum();

    let gap = w
        .iter()
        .zip(beta)
        .map(|(w, b)| w * b * ((1.0 + sum_wb) / (w * (1.0 + sum_b))).ln())
        .sum::<f64>()
        + ((1.0 + sum_wb) / (1.0 + sum_b)).ln();

    let ne = nash_type2(spec)?;
    let pb = pareto_type2(spec, w)?;
    let gap_from_utilities = weighted_log_ratio(w, &ne.utilities, &pb.utilities);
    check_agreement("price of anarchy", gap, gap_from_utilities)?;

    let lower_bound = (1.0 + sum_wb) * ((1.0 + sum_wb).powi(2) / ((1.0 + sum_w2b) * (1.0 + sum_b))).ln();
    Ok(PoAReport {
        gap,
        gap_from_utilities,
        lower_bound,
        upper_bound: 0.0,
    })
}

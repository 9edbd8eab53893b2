//! Game families, state and utility evaluation, and a numeric checker for the
//! structural assumptions (A1–A4) that make a game linearly coupled.

use std::fmt;
use std::ops::Deref;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on `Σ ω_n = 1`.
pub const WEIGHT_SUM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    /// `s_n(a) = ∏_{m≠n} (μ_m − τ_m a_m)`
    #[serde(rename = "type1")]
    TypeI,
    /// `s_n(a) = μ − Σ_m τ_m a_m`
    #[serde(rename = "type2")]
    TypeII,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::TypeI => f.write_str("type1"),
            Family::TypeII => f.write_str("type2"),
        }
    }
}

/// Capacity parameter: one shared value for Type II, one per user for Type I.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Mu {
    Shared(f64),
    PerUser(Vec<f64>),
}

/// Parametric description of a Type I or Type II game.
///
/// Fields are validated on construction and immutable afterwards.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGameSpec", into = "RawGameSpec")]
pub struct GameSpec {
    family: Family,
    beta: Vec<f64>,
    tau: Vec<f64>,
    mu: Mu,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawGameSpec {
    family: Family,
    beta: Vec<f64>,
    tau: Vec<f64>,
    mu: Mu,
    action_lower: Vec<f64>,
    action_upper: Vec<f64>,
}

impl TryFrom<RawGameSpec> for GameSpec {
    type Error = Error;

    fn try_from(raw: RawGameSpec) -> Result<Self> {
        let bounds = raw.action_lower.into_iter().zip(raw.action_upper).collect();
        GameSpec::new(raw.family, raw.beta, raw.tau, raw.mu, Some(bounds))
    }
}

impl From<GameSpec> for RawGameSpec {
    fn from(spec: GameSpec) -> Self {
        RawGameSpec {
            family: spec.family,
            beta: spec.beta,
            tau: spec.tau,
            mu: spec.mu,
            action_lower: spec.lower,
            action_upper: spec.upper,
        }
    }
}

fn check_positive(field: &str, values: &[f64]) -> Result<()> {
    for (i, v) in values.iter().enumerate() {
        if !(v.is_finite() && *v > 0.0) {
            return Err(Error::param(format!("{field}[{i}]"), format!("must be a positive finite number, got {v}")));
        }
    }
    Ok(())
}

impl GameSpec {
    /// Builds a spec. When `bounds` is `None` each user gets `[0, μ/τ_n]`
    /// (Type II) or `[0, μ_n/τ_n]` (Type I).
    pub fn new(
        family: Family,
        beta: Vec<f64>,
        tau: Vec<f64>,
        mu: Mu,
        bounds: Option<Vec<(f64, f64)>>,
    ) -> Result<Self> {
        let n = beta.len();
        if n == 0 {
            return Err(Error::param("beta", "at least one user is required"));
        }
        if tau.len() != n {
            return Err(Error::DimensionMismatch {
                what: "tau",
                expected: n,
                actual: tau.len(),
            });
        }
        check_positive("beta", &beta)?;
        check_positive("tau", &tau)?;
        match (&family, &mu) {
            (Family::TypeII, Mu::Shared(m)) => check_positive("mu", &[*m])?,
            (Family::TypeI, Mu::PerUser(ms)) => {
                if ms.len() != n {
                    return Err(Error::DimensionMismatch {
                        what: "mu",
                        expected: n,
                        actual: ms.len(),
                    });
                }
                check_positive("mu", ms)?;
            }
            (Family::TypeII, Mu::PerUser(_)) => {
                return Err(Error::param("mu", "a type2 game takes a single shared mu"))
            }
            (Family::TypeI, Mu::Shared(_)) => {
                return Err(Error::param("mu", "a type1 game takes one mu per user"))
            }
        }

        let (lower, upper): (Vec<f64>, Vec<f64>) = match bounds {
            Some(b) => {
                if b.len() != n {
                    return Err(Error::DimensionMismatch {
                        what: "action_bounds",
                        expected: n,
                        actual: b.len(),
                    });
                }
                b.into_iter().unzip()
            }
            None => (0..n)
                .map(|i| {
                    let cap = match &mu {
                        Mu::Shared(m) => *m,
                        Mu::PerUser(ms) => ms[i],
                    };
                    (0.0, cap / tau[i])
                })
                .unzip(),
        };
        for i in 0..n {
            let (lo, hi) = (lower[i], upper[i]);
            if !(lo.is_finite() && lo >= 0.0) {
                return Err(Error::param(format!("action_bounds[{i}][0]"), format!("must be nonnegative and finite, got {lo}")));
            }
            if !(hi.is_finite() && hi > lo) {
                return Err(Error::param(format!("action_bounds[{i}][1]"), format!("must be finite and exceed the lower bound {lo}, got {hi}")));
            }
        }
        if let (Family::TypeII, Mu::Shared(m)) = (&family, &mu) {
            let floor: f64 = tau.iter().zip(&lower).map(|(t, lo)| t * lo).sum();
            if floor >= *m {
                return Err(Error::param(
                    "action_bounds",
                    format!("lower bounds leave no action with positive state (Σ τ·lower = {floor} ≥ mu = {m})"),
                ));
            }
        }

        Ok(GameSpec {
            family,
            beta,
            tau,
            mu,
            lower,
            upper,
        })
    }

    /// Type II game with default bounds.
    pub fn type2(beta: Vec<f64>, tau: Vec<f64>, mu: f64) -> Result<Self> {
        GameSpec::new(Family::TypeII, beta, tau, Mu::Shared(mu), None)
    }

    /// Type I game with default bounds.
    pub fn type1(beta: Vec<f64>, tau: Vec<f64>, mu: Vec<f64>) -> Result<Self> {
        GameSpec::new(Family::TypeI, beta, tau, Mu::PerUser(mu), None)
    }

    /// Slotted random access: `u_n(p) = p_n ∏_{m≠n}(1 − p_m)`, `p_n ∈ [0, 1]`.
    pub fn random_access(n_users: usize) -> Result<Self> {
        GameSpec::type1(vec![1.0; n_users], vec![1.0; n_users], vec![1.0; n_users])
    }

    /// Same game with replaced action bounds.
    pub fn with_bounds(&self, bounds: Vec<(f64, f64)>) -> Result<Self> {
        GameSpec::new(
            self.family,
            self.beta.clone(),
            self.tau.clone(),
            self.mu.clone(),
            Some(bounds),
        )
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn n_users(&self) -> usize {
        self.beta.len()
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    pub fn tau(&self) -> &[f64] {
        &self.tau
    }

    pub fn mu(&self) -> &Mu {
        &self.mu
    }

    pub fn action_lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn action_upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn bounds(&self, user: usize) -> (f64, f64) {
        (self.lower[user], self.upper[user])
    }

    /// The shared capacity of a Type II game.
    pub fn shared_mu(&self) -> Result<f64> {
        match (&self.family, &self.mu) {
            (Family::TypeII, Mu::Shared(m)) => Ok(*m),
            _ => Err(Error::WrongFamily { expected: "type2" }),
        }
    }

    pub(crate) fn require_type2(&self) -> Result<f64> {
        self.shared_mu()
    }

    pub(crate) fn require_type1(&self) -> Result<&[f64]> {
        match (&self.family, &self.mu) {
            (Family::TypeI, Mu::PerUser(ms)) => Ok(ms),
            _ => Err(Error::WrongFamily { expected: "type1" }),
        }
    }

    /// Per-user states at `a`; no bounds or dimension checks.
    pub fn states(&self, a: &[f64]) -> Vec<f64> {
        match &self.mu {
            Mu::Shared(m) => {
                let s = m - self.tau.iter().zip(a).map(|(t, x)| t * x).sum::<f64>();
                vec![s; self.n_users()]
            }
            Mu::PerUser(ms) => {
                let factors: Vec<f64> = ms
                    .iter()
                    .zip(&self.tau)
                    .zip(a)
                    .map(|((m, t), x)| m - t * x)
                    .collect();
                (0..self.n_users())
                    .map(|n| {
                        factors
                            .iter()
                            .enumerate()
                            .filter(|(m, _)| *m != n)
                            .map(|(_, f)| f)
                            .product()
                    })
                    .collect()
            }
        }
    }

    /// Utility of user `n` given its action and state.
    pub fn utility_from_state(&self, n: usize, action: f64, state: f64) -> f64 {
        action.powf(self.beta[n]) * state
    }

    /// Whether every affine factor making up the states is strictly positive.
    pub fn factors_positive(&self, a: &[f64]) -> bool {
        match &self.mu {
            Mu::Shared(_) => self.states(a)[0] > 0.0,
            Mu::PerUser(ms) => ms
                .iter()
                .zip(&self.tau)
                .zip(a)
                .all(|((m, t), x)| m - t * x > 0.0),
        }
    }

    /// Whether `a` lies in the action box.
    pub fn contains(&self, a: &[f64]) -> bool {
        a.len() == self.n_users()
            && a.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(x, (lo, hi))| *x >= *lo && *x <= *hi)
    }

    /// Projects each coordinate of `a` onto its action interval.
    pub fn clamp(&self, a: &ActionProfile) -> ActionProfile {
        ActionProfile(
            a.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .map(|(x, (lo, hi))| x.clamp(*lo, *hi))
                .collect(),
        )
    }

    pub(crate) fn check_dim(&self, what: &'static str, len: usize) -> Result<()> {
        if len != self.n_users() {
            return Err(Error::DimensionMismatch {
                what,
                expected: self.n_users(),
                actual: len,
            });
        }
        Ok(())
    }
}

macro_rules! real_vector {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(pub Vec<f64>);

        impl Deref for $name {
            type Target = [f64];

            fn deref(&self) -> &[f64] {
                &self.0
            }
        }

        impl From<Vec<f64>> for $name {
            fn from(v: Vec<f64>) -> Self {
                $name(v)
            }
        }

        impl $name {
            pub fn into_inner(self) -> Vec<f64> {
                self.0
            }
        }
    };
}

real_vector!(
    /// Joint action `a = (a_1, …, a_N)`.
    ActionProfile
);
real_vector!(
    /// Per-user states `s_n(a)`.
    StateVector
);
real_vector!(
    /// Per-user utilities `u_n(a)`.
    UtilityVector
);

impl ActionProfile {
    /// Max-norm distance to another profile.
    pub fn max_distance(&self, other: &[f64]) -> f64 {
        self.iter()
            .zip(other)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    }
}

/// Proportional-fairness weights on the probability simplex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Weights(Vec<f64>);

impl Weights {
    pub fn new(omega: Vec<f64>) -> Result<Self> {
        if omega.is_empty() {
            return Err(Error::param("weights", "must not be empty"));
        }
        for (i, w) in omega.iter().enumerate() {
            if !(w.is_finite() && *w >= 0.0) {
                return Err(Error::param(format!("weights[{i}]"), format!("must be nonnegative, got {w}")));
            }
        }
        let total: f64 = omega.iter().sum();
        if (total - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::param("weights", format!("must sum to 1, got {total}")));
        }
        Ok(Weights(omega))
    }

    pub fn uniform(n: usize) -> Self {
        Weights(vec![1.0 / n as f64; n])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// Index of the first zero weight, if any.
    pub fn first_zero(&self) -> Option<usize> {
        self.0.iter().position(|w| *w == 0.0)
    }
}

impl Deref for Weights {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for Weights {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Weights::new(v)
    }
}

impl From<Weights> for Vec<f64> {
    fn from(w: Weights) -> Self {
        w.0
    }
}

/// States and utilities at `a`.
///
/// Negative states are reported as computed. Bounds are not enforced here so
/// that unclamped dynamics can be evaluated along their whole path.
pub fn evaluate(spec: &GameSpec, a: &ActionProfile) -> Result<(StateVector, UtilityVector)> {
    spec.check_dim("action profile", a.len())?;
    let s = spec.states(a);
    let u = s
        .iter()
        .zip(a.iter())
        .enumerate()
        .map(|(n, (s, x))| spec.utility_from_state(n, *x, *s))
        .collect();
    Ok((StateVector(s), UtilityVector(u)))
}

/// A state map whose structure can be checked against A1–A4.
///
/// [`GameSpec`] implements this; tests and downstream code may supply their own
/// maps to check extensions of the two families.
pub trait StateModel {
    fn n_users(&self) -> usize;
    fn bounds(&self, user: usize) -> (f64, f64);
    fn states(&self, a: &[f64]) -> Vec<f64>;
    /// Whether every affine factor of every state is positive at `a`.
    fn factors_positive(&self, a: &[f64]) -> bool {
        self.states(a).iter().all(|s| *s > 0.0)
    }
}

impl StateModel for GameSpec {
    fn n_users(&self) -> usize {
        GameSpec::n_users(self)
    }

    fn bounds(&self, user: usize) -> (f64, f64) {
        GameSpec::bounds(self, user)
    }

    fn states(&self, a: &[f64]) -> Vec<f64> {
        GameSpec::states(self, a)
    }

    fn factors_positive(&self, a: &[f64]) -> bool {
        GameSpec::factors_positive(self, a)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Assumption {
    A1,
    A2,
    A3,
    A4,
}

impl fmt::Display for Assumption {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Which clause of A4's own-action condition user `m` satisfies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OwnActionBranch {
    /// `s'_mm / s_m = 0`: the user's own action does not move its state.
    Insensitive,
    /// `s'_mm / s_m = s'_nm / s_n`: the own action moves the state like everyone else's.
    Proportional,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssumptionCheck {
    pub assumption: Assumption,
    pub passed: bool,
    pub worst_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub samples: usize,
    pub checks: Vec<AssumptionCheck>,
    /// Per user; `None` when no branch held uniformly (or `N = 1`).
    pub own_action_branch: Vec<Option<OwnActionBranch>>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, which: Assumption) -> &AssumptionCheck {
        self.checks
            .iter()
            .find(|c| c.assumption == which)
            .expect("every assumption is checked")
    }
}

/// Step of the central differences for first derivatives.
pub const FD_STEP: f64 = 1e-6;
/// Relative second-difference tolerance for linearity of states (A2).
pub const LINEARITY_TOL: f64 = 1e-8;
/// Relative second-difference tolerance for affinity of `s_n / s'_nm` (A3).
pub const AFFINE_TOL: f64 = 1e-5;
/// Relative agreement tolerance for the coupling ratios (A4).
pub const RATIO_TOL: f64 = 1e-7;
/// Second differences probe at this fraction of each interval's width.
const CURVATURE_FRACTION: f64 = 1e-2;
const MAX_ATTEMPTS_PER_SAMPLE: usize = 100_000;

/// Numerically checks A1–A4 for `spec` at `samples` random interior points.
pub fn validate_assumptions(spec: &GameSpec, samples: usize, seed: u64) -> Result<ValidationReport> {
    validate_state_model(spec, samples, seed)
}

/// [`validate_assumptions`] for an arbitrary [`StateModel`].
pub fn validate_state_model<M: StateModel>(model: &M, samples: usize, seed: u64) -> Result<ValidationReport> {
    let n = model.n_users();
    if samples == 0 {
        return Err(Error::param("samples", "must be positive"));
    }
    let bounds: Vec<(f64, f64)> = (0..n).map(|i| model.bounds(i)).collect();
    if let Some((i, (lo, hi))) = bounds.iter().enumerate().find(|(_, (lo, hi))| !(hi > lo)) {
        return Err(Error::EmptySamplingRegion(format!("user {} has degenerate bounds [{lo}, {hi}]", i + 1)));
    }
    let steps: Vec<f64> = bounds.iter().map(|(lo, hi)| CURVATURE_FRACTION * (hi - lo)).collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut a1 = Worst::default();
    let mut a2 = Worst::default();
    let mut a3 = Worst::default();
    let mut a4 = Worst::default();
    let mut branches: Vec<BranchTally> = vec![BranchTally::default(); n];

    for _ in 0..samples {
        let x = draw_interior(model, &bounds, &steps, &mut rng)?;
        let s = model.states(&x);

        for sn in &s {
            a1.record(if *sn >= 0.0 { 0.0 } else { -sn / sn.abs().max(1.0) }, *sn >= 0.0);
        }

        // d[n][m] = ∂s_n/∂a_m
        let d = jacobian(model, &x);
        for nn in 0..n {
            for m in 0..n {
                let scale = s[nn].abs().max(f64::MIN_POSITIVE);
                let slope = d[nn][m] / scale;
                let sign_ok = if m == nn {
                    d[nn][m] <= RATIO_TOL * d_scale(&d[nn])
                } else {
                    d[nn][m] < 0.0
                };
                let curvature = second_difference(&x, m, steps[m], |y| model.states(y)[nn]);
                a2.record(curvature.max(if sign_ok { 0.0 } else { slope.abs() }), sign_ok && curvature <= LINEARITY_TOL);
            }
        }

        let mut dirs: Vec<Vec<f64>> = (0..n)
            .map(|k| {
                let mut e = vec![0.0; n];
                e[k] = steps[k];
                e
            })
            .collect();
        dirs.push(steps.iter().map(|h| h * rng.random_range(-1.0..1.0)).collect());
        for m in 0..n {
            for nn in (0..n).filter(|nn| *nn != m) {
                let g = |y: &[f64]| {
                    let sy = model.states(y)[nn];
                    sy / partial(model, y, nn, m)
                };
                for dir in &dirs {
                    let r = directional_second_difference(&x, dir, g);
                    a3.record(r, r <= AFFINE_TOL);
                }
            }
        }

        for m in 0..n {
            let ratios: Vec<f64> = (0..n).filter(|k| *k != m).map(|k| d[k][m] / s[k]).collect();
            let Some(&reference) = ratios.first() else {
                continue;
            };
            let scale = reference.abs().max(f64::MIN_POSITIVE);
            let spread = ratios.iter().map(|r| (r - reference).abs()).fold(0.0, f64::max) / scale;
            a4.record(spread, spread <= RATIO_TOL);

            let own = d[m][m] / s[m];
            let zero_res = own.abs() / scale;
            let equal_res = (own - reference).abs() / scale;
            branches[m].record(zero_res <= RATIO_TOL, equal_res <= RATIO_TOL, zero_res.min(equal_res));
        }
    }

    let own_action_branch: Vec<Option<OwnActionBranch>> = branches.iter().map(BranchTally::verdict).collect();
    if n > 1 {
        for (tally, verdict) in branches.iter().zip(&own_action_branch) {
            a4.record(tally.worst, verdict.is_some());
        }
    }

    Ok(ValidationReport {
        samples,
        checks: vec![
            a1.finish(Assumption::A1),
            a2.finish(Assumption::A2),
            a3.finish(Assumption::A3),
            a4.finish(Assumption::A4),
        ],
        own_action_branch,
    })
}

#[derive(Default)]
struct Worst {
    residual: f64,
    failed: bool,
}

impl Worst {
    fn record(&mut self, residual: f64, ok: bool) {
        if residual.is_nan() {
            self.failed = true;
            self.residual = f64::NAN;
            return;
        }
        if !self.residual.is_nan() {
            self.residual = self.residual.max(residual);
        }
        self.failed |= !ok;
    }

    fn finish(self, assumption: Assumption) -> AssumptionCheck {
        AssumptionCheck {
            assumption,
            passed: !self.failed,
            worst_residual: self.residual,
        }
    }
}

#[derive(Clone, Default)]
struct BranchTally {
    seen: usize,
    zero: usize,
    equal: usize,
    worst: f64,
}

impl BranchTally {
    fn record(&mut self, zero: bool, equal: bool, residual: f64) {
        self.seen += 1;
        self.zero += usize::from(zero);
        self.equal += usize::from(equal);
        self.worst = self.worst.max(residual);
    }

    fn verdict(&self) -> Option<OwnActionBranch> {
        if self.seen == 0 {
            None
        } else if self.zero == self.seen {
            Some(OwnActionBranch::Insensitive)
        } else if self.equal == self.seen {
            Some(OwnActionBranch::Proportional)
        } else {
            None
        }
    }
}

fn d_scale(row: &[f64]) -> f64 {
    row.iter().map(|v| v.abs()).fold(0.0, f64::max)
}

fn draw_interior<M: StateModel>(
    model: &M,
    bounds: &[(f64, f64)],
    steps: &[f64],
    rng: &mut ChaCha8Rng,
) -> Result<Vec<f64>> {
    let n = bounds.len();
    for _ in 0..MAX_ATTEMPTS_PER_SAMPLE {
        let x: Vec<f64> = bounds
            .iter()
            .zip(steps)
            .map(|((lo, hi), h)| rng.random_range((lo + h)..(hi - h)))
            .collect();
        let stencil_ok = model.factors_positive(&x)
            && (0..n).all(|k| {
                [-1.0, 1.0].iter().all(|sign| {
                    let mut y = x.clone();
                    y[k] += sign * steps[k];
                    model.factors_positive(&y)
                })
            });
        if stencil_ok {
            return Ok(x);
        }
    }
    Err(Error::EmptySamplingRegion(
        "no interior point with positive state factors was found".into(),
    ))
}

fn partial<M: StateModel>(model: &M, x: &[f64], n: usize, m: usize) -> f64 {
    let mut hi = x.to_vec();
    let mut lo = x.to_vec();
    hi[m] += FD_STEP;
    lo[m] -= FD_STEP;
    (model.states(&hi)[n] - model.states(&lo)[n]) / (2.0 * FD_STEP)
}

fn jacobian<M: StateModel>(model: &M, x: &[f64]) -> Vec<Vec<f64>> {
    let n = x.len();
    let mut d = vec![vec![0.0; n]; n];
    for m in 0..n {
        let mut hi = x.to_vec();
        let mut lo = x.to_vec();
        hi[m] += FD_STEP;
        lo[m] -= FD_STEP;
        let (sh, sl) = (model.states(&hi), model.states(&lo));
        for k in 0..n {
            d[k][m] = (sh[k] - sl[k]) / (2.0 * FD_STEP);
        }
    }
    d
}

fn second_difference(x: &[f64], axis: usize, step: f64, f: impl Fn(&[f64]) -> f64) -> f64 {
    let mut dir = vec![0.0; x.len()];
    dir[axis] = step;
    directional_second_difference(x, &dir, f)
}

/// `|f(x+d) − 2f(x) + f(x−d)|` relative to the largest of the three values.
fn directional_second_difference(x: &[f64], dir: &[f64], f: impl Fn(&[f64]) -> f64) -> f64 {
    let plus: Vec<f64> = x.iter().zip(dir).map(|(a, d)| a + d).collect();
    let minus: Vec<f64> = x.iter().zip(dir).map(|(a, d)| a - d).collect();
    let (fp, f0, fm) = (f(&plus), f(x), f(&minus));
    let scale = fp.abs().max(f0.abs()).max(fm.abs()).max(f64::MIN_POSITIVE);
    (fp - 2.0 * f0 + fm).abs() / scale
}

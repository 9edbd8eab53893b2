//! Dense linear solves and the structured spectrum of the best-response Jacobian.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::GameSpec;

/// Pivot ratio above which a matrix is treated as singular.
pub const MAX_CONDITION: f64 = 1e12;
/// Relative tolerance under which two exponents are merged into one group.
pub const BETA_TIE_TOL: f64 = 1e-12;
/// Bracket width at which bisection is allowed to stop.
pub const ROOT_TOL: f64 = 1e-12;
pub const MAX_BISECTIONS: usize = 200;

/// Square system `A x = b`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSystem {
    matrix: Vec<Vec<f64>>,
    rhs: Vec<f64>,
}

impl LinearSystem {
    pub fn new(matrix: Vec<Vec<f64>>, rhs: Vec<f64>) -> Result<Self> {
        let n = rhs.len();
        if matrix.len() != n {
            return Err(Error::DimensionMismatch {
                what: "matrix rows",
                expected: n,
                actual: matrix.len(),
            });
        }
        if let Some(row) = matrix.iter().find(|r| r.len() != n) {
            return Err(Error::DimensionMismatch {
                what: "matrix columns",
                expected: n,
                actual: row.len(),
            });
        }
        Ok(LinearSystem { matrix, rhs })
    }

    pub fn matrix(&self) -> &[Vec<f64>] {
        &self.matrix
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    pub fn dim(&self) -> usize {
        self.rhs.len()
    }

    /// `‖A x − b‖_∞`
    pub fn residual(&self, x: &[f64]) -> f64 {
        self.matrix
            .iter()
            .zip(&self.rhs)
            .map(|(row, b)| (row.iter().zip(x).map(|(a, x)| a * x).sum::<f64>() - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Gaussian elimination with partial pivoting.
///
/// Fails with [`Error::Singular`] when a pivot vanishes or the ratio of the
/// largest to the smallest pivot exceeds [`MAX_CONDITION`].
pub fn solve_linear(sys: &LinearSystem) -> Result<Vec<f64>> {
    let n = sys.dim();
    let mut a: Vec<Vec<f64>> = sys.matrix.clone();
    let mut b = sys.rhs.clone();
    let mut min_pivot = f64::INFINITY;
    let mut max_pivot: f64 = 0.0;

    for col in 0..n {
        let (p, pivot) = (col..n)
            .map(|r| (r, a[r][col].abs()))
            .fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if pivot == 0.0 || !pivot.is_finite() {
            return Err(Error::Singular { pivot });
        }
        min_pivot = min_pivot.min(pivot);
        max_pivot = max_pivot.max(pivot);
        a.swap(col, p);
        b.swap(col, p);

        for r in col + 1..n {
            let factor = a[r][col] / a[col][col];
            if factor == 0.0 {
                continue;
            }
            for c in col..n {
                a[r][c] -= factor * a[col][c];
            }
            b[r] -= factor * b[col];
        }
    }
    if n > 0 && max_pivot / min_pivot > MAX_CONDITION {
        return Err(Error::Singular { pivot: min_pivot });
    }

    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let tail: f64 = (r + 1..n).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - tail) / a[r][r];
    }
    Ok(x)
}

/// Eigenvalues of the best-response Jacobian together with the convergence
/// indicator `q(−1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumResult {
    /// Ascending, with multiplicity.
    pub eigenvalues: Vec<f64>,
    pub spectral_radius: f64,
    pub q_at_minus_one: f64,
}

impl SpectrumResult {
    pub fn from_eigenvalues(mut eigenvalues: Vec<f64>, q_at_minus_one: f64) -> Self {
        eigenvalues.sort_by(f64::total_cmp);
        let spectral_radius = eigenvalues.iter().map(|e| e.abs()).fold(0.0, f64::max);
        SpectrumResult {
            eigenvalues,
            spectral_radius,
            q_at_minus_one,
        }
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }
}

pub(crate) fn check_lambda(spec: &GameSpec, lambda: &[f64]) -> Result<()> {
    spec.check_dim("lambda", lambda.len())?;
    for (i, l) in lambda.iter().enumerate() {
        if !(l.is_finite() && *l > 0.0) {
            return Err(Error::param(format!("lambda[{i}]"), format!("must be positive, got {l}")));
        }
    }
    Ok(())
}

/// The best-response Jacobian, entry `(i, k) = ∂a_i^t / ∂a_k^{t−1}`.
///
/// Entries do not depend on the current actions.
pub fn br_jacobian_matrix(spec: &GameSpec, lambda: &[f64]) -> Result<Vec<Vec<f64>>> {
    spec.require_type2()?;
    check_lambda(spec, lambda)?;
    let (beta, tau) = (spec.beta(), spec.tau());
    let n = spec.n_users();
    Ok((0..n)
        .map(|i| {
            let scale = beta[i] / (lambda[i] * (1.0 + beta[i]));
            (0..n)
                .map(|k| if i == k { scale * (lambda[i] - tau[i]) } else { -scale * tau[k] })
                .collect()
        })
        .collect())
}

/// Users sharing one exponent value.
struct ExponentGroup {
    /// `κ / (1 + κ)`, a pole of `q`.
    pole: f64,
    size: usize,
    /// `Σ τ_n / λ_n` over the group.
    weight: f64,
}

fn exponent_groups(beta: &[f64], tau: &[f64], lambda: &[f64]) -> Vec<ExponentGroup> {
    let mut order: Vec<usize> = (0..beta.len()).collect();
    order.sort_by(|&i, &j| beta[i].total_cmp(&beta[j]));
    let mut groups: Vec<(f64, ExponentGroup)> = Vec::new();
    for i in order {
        let ratio = tau[i] / lambda[i];
        match groups.last_mut() {
            Some((kappa, g)) if (beta[i] - *kappa).abs() <= BETA_TIE_TOL * kappa.abs() => {
                g.size += 1;
                g.weight += ratio;
            }
            _ => groups.push((
                beta[i],
                ExponentGroup {
                    pole: beta[i] / (1.0 + beta[i]),
                    size: 1,
                    weight: ratio,
                },
            )),
        }
    }
    groups.into_iter().map(|(_, g)| g).collect()
}

fn q_grouped(groups: &[ExponentGroup], xi: f64) -> f64 {
    groups.iter().map(|g| g.weight * g.pole / (g.pole - xi)).sum()
}

/// `q(ξ) = Σ_n τ_n / (λ_n (1 − ξ (1 + β_n)/β_n))`.
pub fn q_function(spec: &GameSpec, lambda: &[f64], xi: f64) -> Result<f64> {
    spec.require_type2()?;
    check_lambda(spec, lambda)?;
    Ok(spec
        .beta()
        .iter()
        .zip(spec.tau())
        .zip(lambda)
        .map(|((b, t), l)| t / (l * (1.0 - xi * (1.0 + b) / b)))
        .sum())
}

/// `q(−1) = Σ_n τ_n β_n / (λ_n (1 + 2β_n))`; BR dynamics converge iff this is below 1.
pub fn convergence_indicator(spec: &GameSpec, lambda: &[f64]) -> Result<f64> {
    spec.require_type2()?;
    check_lambda(spec, lambda)?;
    Ok(spec
        .beta()
        .iter()
        .zip(spec.tau())
        .zip(lambda)
        .map(|((b, t), l)| t * b / (l * (1.0 + 2.0 * b)))
        .sum())
}

/// Root of the increasing function `f` on `(lo, hi)` where `f(lo) < 0 < f(hi)`
/// (endpoints may be poles and are never evaluated).
///
/// Stops once the bracket is narrower than [`ROOT_TOL`] and the residual is
/// below `1e-10`; near a pole `q` is steep, so the bracket may need to shrink
/// further, down to adjacent floats.
fn bisect_increasing(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    let mut best = 0.5 * (lo + hi);
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        best = mid;
        let value = f(mid);
        if value < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= ROOT_TOL * mid.abs().max(1.0) && value.abs() <= 1e-10 {
            break;
        }
    }
    best
}

/// All eigenvalues of the best-response Jacobian of a Type II game.
///
/// Exponents are grouped into distinct values `κ_1 < … < κ_K` with counts
/// `n_k`. Each pole `κ_k/(1+κ_k)` is an eigenvalue of multiplicity `n_k − 1`;
/// the remaining `K` eigenvalues are the roots of `q(ξ) = 1`, one left of the
/// first pole and one between each pair of adjacent poles. `q` increases on
/// every such interval, so bisection always succeeds.
pub fn br_jacobian_spectrum(spec: &GameSpec, lambda: &[f64]) -> Result<SpectrumResult> {
    spec.require_type2()?;
    check_lambda(spec, lambda)?;
    let groups = exponent_groups(spec.beta(), spec.tau(), lambda);
    let excess = |xi: f64| q_grouped(&groups, xi) - 1.0;

    let mut eigenvalues = Vec::with_capacity(spec.n_users());
    for g in &groups {
        eigenvalues.extend(std::iter::repeat(g.pole).take(g.size - 1));
    }

    let first = groups[0].pole;
    let mut reach = 1.0;
    while excess(first - reach) >= 0.0 {
        reach *= 2.0;
    }
    eigenvalues.push(bisect_increasing(first - reach, first, excess));
    for pair in groups.windows(2) {
        eigenvalues.push(bisect_increasing(pair[0].pole, pair[1].pole, excess));
    }

    Ok(SpectrumResult::from_eigenvalues(
        eigenvalues,
        convergence_indicator(spec, lambda)?,
    ))
}

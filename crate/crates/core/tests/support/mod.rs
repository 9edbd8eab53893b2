//! Independent oracles and random generators shared by the integration suites.
//!
//! Nothing here calls the structured spectrum or the closed forms; the oracles
//! work from the explicit Jacobian entries and from brute-force search.

#![allow(dead_code)]

use lcg_core::{ActionProfile, GameSpec, Weights};
use rand::Rng;

/// Coefficients of `det(xI − A)`, ascending powers, leading coefficient 1
/// (Faddeev–LeVerrier).
pub fn char_poly(a: &[Vec<f64>]) -> Vec<f64> {
    let n = a.len();
    let mut coeffs = vec![0.0; n + 1];
    coeffs[n] = 1.0;
    let mut m = vec![vec![0.0; n]; n];
    for k in 1..=n {
        // M_k = A M_{k−1} + c_{n−k+1} I
        let mut next = matmul(a, &m);
        for (i, row) in next.iter_mut().enumerate() {
            row[i] += coeffs[n - k + 1];
        }
        let am = matmul(a, &next);
        let trace: f64 = (0..n).map(|i| am[i][i]).sum();
        coeffs[n - k] = -trace / k as f64;
        m = next;
    }
    coeffs
}

fn matmul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    (0..n)
        .map(|i| (0..n).map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum()).collect())
        .collect()
}

pub fn poly_eval(p: &[f64], x: f64) -> f64 {
    p.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

fn derivative(p: &[f64]) -> Vec<f64> {
    p.iter().enumerate().skip(1).map(|(i, c)| i as f64 * c).collect()
}

fn bisect(p: &[f64], mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = poly_eval(p, lo);
    for _ in 0..300 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = poly_eval(p, mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Real roots of a polynomial (ascending coefficients) with only simple real
/// roots, isolated between consecutive critical points.
pub fn real_roots(p: &[f64]) -> Vec<f64> {
    let deg = p.len() - 1;
    if deg == 0 {
        return vec![];
    }
    if deg == 1 {
        return vec![-p[0] / p[1]];
    }
    let lead = p[deg];
    let bound = 1.0 + p[..deg].iter().map(|c| (c / lead).abs()).fold(0.0, f64::max);
    let mut knots = vec![-bound];
    knots.extend(real_roots(&derivative(p)).into_iter().filter(|c| c.abs() < bound));
    knots.push(bound);
    knots.sort_by(f64::total_cmp);

    let mut roots = Vec::new();
    for pair in knots.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let (fa, fb) = (poly_eval(p, a), poly_eval(p, b));
        if fa == 0.0 {
            roots.push(a);
        } else if (fa < 0.0) != (fb < 0.0) && fb != 0.0 {
            roots.push(bisect(p, a, b));
        }
    }
    if poly_eval(p, bound) == 0.0 {
        roots.push(bound);
    }
    roots.sort_by(f64::total_cmp);
    roots
}

/// The best-response Jacobian assembled entry by entry.
pub fn explicit_jacobian(beta: &[f64], tau: &[f64], lambda: &[f64]) -> Vec<Vec<f64>> {
    let n = beta.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|k| {
                    if i == k {
                        beta[k] * (lambda[k] - tau[k]) / (lambda[k] * (1.0 + beta[k]))
                    } else {
                        -beta[i] * tau[k] / (lambda[i] * (1.0 + beta[i]))
                    }
                })
                .collect()
        })
        .collect()
}

pub fn brute_force_eigenvalues(beta: &[f64], tau: &[f64], lambda: &[f64]) -> Vec<f64> {
    real_roots(&char_poly(&explicit_jacobian(beta, tau, lambda)))
}

/// Random Type II game: `N ∈ users`, `β, τ ∈ [0.2, 5]`, `μ ∈ [1, 20]`.
pub fn random_type2<R: Rng>(rng: &mut R, users: std::ops::RangeInclusive<usize>) -> GameSpec {
    let n = rng.random_range(users);
    let beta = (0..n).map(|_| rng.random_range(0.2..5.0)).collect();
    let tau = (0..n).map(|_| rng.random_range(0.2..5.0)).collect();
    GameSpec::type2(beta, tau, rng.random_range(1.0..20.0)).unwrap()
}

/// Interior weight vector: entries drawn from `[0.05, 1)` and normalized.
pub fn random_weights<R: Rng>(rng: &mut R, n: usize) -> Weights {
    let raw: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let mut w: Vec<f64> = raw.iter().map(|x| x / total).collect();
    // absorb rounding so the sum is 1 to machine precision
    let drift: f64 = 1.0 - w.iter().sum::<f64>();
    w[0] += drift;
    Weights::new(w).unwrap()
}

/// Uniform point of `{a ≥ 0 : Σ τ_m a_m ≤ μ}` via flat Dirichlet sampling.
pub fn random_feasible<R: Rng>(rng: &mut R, spec: &GameSpec) -> ActionProfile {
    let mu = spec.shared_mu().unwrap();
    let n = spec.n_users();
    let e: Vec<f64> = (0..=n).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let total: f64 = e.iter().sum();
    ActionProfile(
        (0..n)
            .map(|i| (mu * e[i] / total / spec.tau()[i]).min(spec.action_upper()[i]))
            .collect(),
    )
}

/// Uniform point of the action box.
pub fn random_in_box<R: Rng>(rng: &mut R, spec: &GameSpec) -> ActionProfile {
    ActionProfile(
        spec.action_lower()
            .iter()
            .zip(spec.action_upper())
            .map(|(lo, hi)| rng.random_range(*lo..*hi))
            .collect(),
    )
}

/// Calls `visit` on every point of a regular grid with `points` values per axis
/// spanning `[lo_i, hi_i]` inclusive.
pub fn for_each_grid_point(lo: &[f64], hi: &[f64], points: usize, mut visit: impl FnMut(&[f64])) {
    let n = lo.len();
    let mut idx = vec![0usize; n];
    let mut x: Vec<f64> = lo.to_vec();
    loop {
        for i in 0..n {
            x[i] = lo[i] + (hi[i] - lo[i]) * idx[i] as f64 / (points - 1) as f64;
        }
        visit(&x);
        let mut axis = 0;
        loop {
            if axis == n {
                return;
            }
            idx[axis] += 1;
            if idx[axis] < points {
                break;
            }
            idx[axis] = 0;
            axis += 1;
        }
    }
}

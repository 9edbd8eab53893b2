//! Fixtures shared by the benchmarks in `benches/`.

use lcg_core::{GameSpec, Weights};

/// A Type II game with `n` users and spread-out parameters.
pub fn spread_spec(n: usize) -> GameSpec {
    let beta = (0..n).map(|i| 0.5 + (i % 7) as f64 * 0.6).collect();
    let tau = (0..n).map(|i| 1.0 + (i % 5) as f64 * 0.9).collect();
    GameSpec::type2(beta, tau, 10.0 * n as f64).expect("fixture parameters are valid")
}

/// Beliefs whose conjectural equilibrium is the equal-weight Pareto point.
pub fn pareto_lambda(spec: &GameSpec) -> Vec<f64> {
    let n = spec.n_users() as f64;
    spec.tau().iter().map(|t| n * t).collect()
}

pub fn uniform(spec: &GameSpec) -> Weights {
    Weights::uniform(spec.n_users())
}

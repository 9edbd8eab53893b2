//! Solvers for linearly coupled multi-user communication games.
//!
//! A linearly coupled game gives user `n` the utility `u_n(a) = a_n^β_n · s_n(a)`,
//! where the state `s_n` decreases affinely in every opponent's action. Two
//! families are supported:
//!
//! * [`Family::TypeI`]: `s_n(a) = ∏_{m≠n} (μ_m − τ_m a_m)` (random access).
//! * [`Family::TypeII`]: `s_n(a) = μ − Σ_m τ_m a_m` (flow control).
//!
//! The crate computes Nash equilibria and Pareto-boundary points in closed form,
//! builds linear beliefs that sustain any positive operating point as a
//! conjectural equilibrium, iterates best-response and Jacobi dynamics, and
//! certifies their convergence from the spectrum of the iteration Jacobian.
//!
//! ```
//! use lcg_core::{equilibria, GameSpec, Weights};
//!
//! let spec = GameSpec::type2(vec![1.5, 1.0, 0.5], vec![3.0, 4.0, 5.0], 10.0).unwrap();
//! let ne = equilibria::nash_type2(&spec).unwrap();
//! assert!((ne.actions[0] - 1.25).abs() < 1e-12);
//!
//! let w = Weights::uniform(3);
//! let poa = equilibria::price_of_anarchy(&spec, &w).unwrap();
//! assert!(poa.lower_bound < poa.gap && poa.gap < 0.0);
//! ```

pub mod conjecture;
pub mod dynamics;
pub mod equilibria;
mod error;
pub mod model;
pub mod numerics;

pub use conjecture::{BeliefConfig, ConservativenessProfile};
pub use dynamics::{DynamicsConfig, Outcome, StabilityReport, Trajectory, UpdateRule};
pub use equilibria::{EquilibriumKind, EquilibriumResult, PoAReport};
pub use error::{Error, Result};
pub use model::{
    evaluate, validate_assumptions, ActionProfile, Family, GameSpec, Mu, StateVector,
    UtilityVector, ValidationReport, Weights,
};
pub use numerics::{br_jacobian_spectrum, solve_linear, LinearSystem, SpectrumResult};

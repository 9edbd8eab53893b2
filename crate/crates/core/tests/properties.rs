//! Property tests for model, numerics, equilibria and conjecture invariants.

mod support;

use lcg_core::conjecture::{beliefs_for_target, ce_closed_form, conjectured_best_action, log_fairness_functional};
use lcg_core::equilibria::{nash_system, nash_type2, pareto_system, pareto_type2, price_of_anarchy};
use lcg_core::numerics::{q_function, solve_linear};
use lcg_core::{br_jacobian_spectrum, evaluate, ActionProfile, GameSpec, Weights};
use proptest::prelude::*;

fn type2_spec(max_users: usize) -> impl Strategy<Value = GameSpec> {
    (1..=max_users).prop_flat_map(|n| {
        (
            prop::collection::vec(0.2f64..5.0, n),
            prop::collection::vec(0.2f64..5.0, n),
            1.0f64..20.0,
        )
            .prop_map(|(beta, tau, mu)| GameSpec::type2(beta, tau, mu).unwrap())
    })
}

fn type1_spec(max_users: usize) -> impl Strategy<Value = GameSpec> {
    (2..=max_users).prop_flat_map(|n| {
        (
            prop::collection::vec(0.2f64..5.0, n),
            prop::collection::vec(0.2f64..5.0, n),
            prop::collection::vec(0.5f64..5.0, n),
        )
            .prop_map(|(beta, tau, mu)| GameSpec::type1(beta, tau, mu).unwrap())
    })
}

fn any_spec() -> impl Strategy<Value = GameSpec> {
    prop_oneof![type2_spec(5), type1_spec(5)]
}

/// Spec plus a point of its action box, drawn as fractions of each interval.
fn spec_and_point() -> impl Strategy<Value = (GameSpec, ActionProfile)> {
    any_spec().prop_flat_map(|spec| {
        let n = spec.n_users();
        (Just(spec), prop::collection::vec(0.0f64..=1.0, n)).prop_map(|(spec, frac)| {
            let a = frac
                .iter()
                .zip(spec.action_lower().iter().zip(spec.action_upper()))
                .map(|(f, (lo, hi))| lo + f * (hi - lo))
                .collect();
            (spec, ActionProfile(a))
        })
    })
}

fn spec_and_lambda() -> impl Strategy<Value = (GameSpec, Vec<f64>)> {
    type2_spec(6).prop_flat_map(|spec| {
        let n = spec.n_users();
        (Just(spec), prop::collection::vec(0.5f64..10.0, n)).prop_map(|(spec, scale)| {
            let lambda = spec.tau().iter().zip(&scale).map(|(t, s)| t * s).collect();
            (spec, lambda)
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn utility_recomposes_from_state((spec, a) in spec_and_point()) {
        let (s, u) = evaluate(&spec, &a).unwrap();
        for n in 0..spec.n_users() {
            let direct = a[n].powf(spec.beta()[n]) * s[n];
            prop_assert!((direct - u[n]).abs() <= 1e-12 * direct.abs().max(f64::MIN_POSITIVE));
        }
    }

    #[test]
    fn utilities_are_log_concave(
        (spec, a) in spec_and_point(),
        frac in prop::collection::vec(0.0f64..=1.0, 6),
    ) {
        let b: Vec<f64> = (0..spec.n_users())
            .map(|i| {
                let (lo, hi) = spec.bounds(i);
                lo + frac[i % frac.len()] * (hi - lo)
            })
            .collect();
        let mid: Vec<f64> = a.iter().zip(&b).map(|(x, y)| 0.5 * (x + y)).collect();
        let (_, ua) = evaluate(&spec, &a).unwrap();
        let (_, ub) = evaluate(&spec, &ActionProfile(b)).unwrap();
        let (_, um) = evaluate(&spec, &ActionProfile(mid)).unwrap();
        for n in 0..spec.n_users() {
            if ua[n] > 0.0 && ub[n] > 0.0 && um[n] > 0.0 {
                prop_assert!(um[n].ln() >= 0.5 * (ua[n].ln() + ub[n].ln()) - 1e-9);
            }
        }
    }

    #[test]
    fn opponents_never_help(
        (spec, a) in spec_and_point(),
        who in 0usize..5,
        other in 0usize..5,
        bump in 0.0f64..=1.0,
    ) {
        let n = who % spec.n_users();
        let m = other % spec.n_users();
        prop_assume!(n != m);
        let (s, u) = evaluate(&spec, &a).unwrap();
        prop_assume!(s[n] >= 0.0);
        let mut raised = a.clone();
        let (_, hi) = spec.bounds(m);
        raised.0[m] += bump * (hi - a[m]);
        let (_, u2) = evaluate(&spec, &raised).unwrap();
        prop_assert!(u2[n] <= u[n] + 1e-12 * u[n].abs().max(1.0));
    }

    #[test]
    fn spectrum_roots_solve_q((spec, lambda) in spec_and_lambda()) {
        let s = br_jacobian_spectrum(&spec, &lambda).unwrap();
        prop_assert_eq!(s.eigenvalues.len(), spec.n_users());
        prop_assert!(s.max_eigenvalue() < 1.0);
        let poles: Vec<f64> = spec.beta().iter().map(|b| b / (1.0 + b)).collect();
        for r in &s.eigenvalues {
            if poles.iter().any(|p| (p - r).abs() < 1e-15) {
                continue;
            }
            // q is increasing between poles, so a root is a sign change of q − 1
            let d = 1e-12 * r.abs().max(1.0);
            let below = q_function(&spec, &lambda, r - d).unwrap();
            let above = q_function(&spec, &lambda, r + d).unwrap();
            prop_assert!(below <= 1.0 + 1e-8 && above >= 1.0 - 1e-8, "q around {}: {} {}", r, below, above);
        }
        prop_assert_eq!(s.spectral_radius < 1.0, s.q_at_minus_one < 1.0);
    }

    #[test]
    fn spectrum_matches_characteristic_polynomial((spec, lambda) in spec_and_lambda()) {
        prop_assume!(spec.n_users() <= 4);
        let mut b = spec.beta().to_vec();
        b.sort_by(f64::total_cmp);
        prop_assume!(b.windows(2).all(|w| w[1] - w[0] > 1e-3));
        let s = br_jacobian_spectrum(&spec, &lambda).unwrap();
        let oracle = support::brute_force_eigenvalues(spec.beta(), spec.tau(), &lambda);
        prop_assert_eq!(oracle.len(), s.eigenvalues.len());
        for (got, want) in s.eigenvalues.iter().zip(&oracle) {
            prop_assert!((got - want).abs() <= 1e-8, "{:?} vs {:?}", s.eigenvalues, oracle);
        }
    }

    #[test]
    fn nash_resists_unilateral_deviation(spec in type2_spec(6), who in 0usize..6, frac in 0.0f64..=1.0) {
        let ne = nash_type2(&spec).unwrap();
        let n = who % spec.n_users();
        let (lo, hi) = spec.bounds(n);
        let mut dev = ne.actions.clone();
        dev.0[n] = lo + frac * (hi - lo);
        let (_, u) = evaluate(&spec, &dev).unwrap();
        prop_assert!(ne.utilities[n] >= u[n] - 1e-9);
    }

    #[test]
    fn closed_forms_solve_their_linear_systems(spec in type2_spec(6), seed in any::<u64>()) {
        let ne = nash_type2(&spec).unwrap();
        let direct = solve_linear(&nash_system(&spec).unwrap()).unwrap();
        prop_assert!(ne.actions.max_distance(&direct) <= 1e-10);

        let w = support::random_weights(&mut rand_from(seed), spec.n_users());
        let pb = pareto_type2(&spec, &w).unwrap();
        let direct = solve_linear(&pareto_system(&spec, &w).unwrap()).unwrap();
        prop_assert!(pb.actions.max_distance(&direct) <= 1e-10);
    }

    #[test]
    fn nash_is_strictly_inefficient(spec in type2_spec(6), seed in any::<u64>()) {
        prop_assume!(spec.n_users() >= 2);
        let w = support::random_weights(&mut rand_from(seed), spec.n_users());
        let poa = price_of_anarchy(&spec, &w).unwrap();
        prop_assert!(poa.lower_bound < poa.gap && poa.gap < 0.0, "{:?}", poa);
        prop_assert!((poa.gap - poa.gap_from_utilities).abs() <= 1e-9);
    }

    #[test]
    fn ce_definition_holds_for_constructed_beliefs(spec in type2_spec(6), seed in any::<u64>()) {
        let target = support::random_feasible(&mut rand_from(seed), &spec);
        prop_assume!(target.iter().all(|a| *a > 1e-9));
        let state = spec.states(&target)[0];
        prop_assume!(state > 1e-9);
        let beliefs = beliefs_for_target(&spec, &target).unwrap();
        for n in 0..spec.n_users() {
            prop_assert!((beliefs.believed_state(n, target[n]) - state).abs() <= 1e-12 * state.max(1.0));
            let best = conjectured_best_action(&spec, n, &beliefs).unwrap();
            prop_assert!((best - target[n]).abs() <= 1e-9);
        }
    }

    #[test]
    fn ce_with_tau_beliefs_is_nash(spec in type2_spec(6)) {
        let ce = ce_closed_form(&spec, spec.tau()).unwrap();
        let ne = nash_type2(&spec).unwrap();
        prop_assert!(ce.actions.max_distance(&ne.actions) <= 1e-12);
    }

    #[test]
    fn scaling_beliefs_rescales_ce((spec, lambda) in spec_and_lambda(), rho in 1.0f64..10.0) {
        let mu = spec.shared_mu().unwrap();
        let scaled: Vec<f64> = lambda.iter().map(|l| rho * l).collect();
        let ce = ce_closed_form(&spec, &scaled).unwrap();
        let common: f64 = 1.0 + spec.tau().iter().zip(spec.beta()).zip(&lambda)
            .map(|((t, b), l)| t * b / (rho * l)).sum::<f64>();
        for n in 0..spec.n_users() {
            let want = spec.beta()[n] * mu / (lambda[n] * common) / rho;
            prop_assert!((ce.actions[n] - want).abs() <= 1e-12 * want.max(1.0));
        }
    }

    #[test]
    fn pareto_ce_is_log_fair(spec in type2_spec(6), seed in any::<u64>()) {
        let mut rng = rand_from(seed);
        let w = support::random_weights(&mut rng, spec.n_users());
        let lambda: Vec<f64> = spec.tau().iter().zip(w.iter()).map(|(t, w)| t / w).collect();
        let ce = ce_closed_form(&spec, &lambda).unwrap();
        for _ in 0..50 {
            let other = support::random_feasible(&mut rng, &spec);
            let (_, u) = evaluate(&spec, &other).unwrap();
            if u.iter().any(|v| *v <= 0.0) {
                continue;
            }
            let f = log_fairness_functional(&spec, &lambda, &ce.utilities, &u).unwrap();
            prop_assert!(f <= 1e-9, "{}", f);
        }
    }
}

fn rand_from(seed: u64) -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    rand_chacha::ChaCha8Rng::seed_from_u64(seed)
}

#[test]
fn pareto_point_is_not_dominated_on_grid() {
    let spec = GameSpec::type2(vec![1.5, 1.0, 0.5], vec![3.0, 4.0, 5.0], 10.0).unwrap();
    let pb = pareto_type2(&spec, &Weights::uniform(3)).unwrap();
    let upper = spec.action_upper().to_vec();
    let cell = upper.iter().fold(0.0f64, |m, u| m.max(u / 49.0));
    // utilities are Lipschitz on the box; allow one cell of slack
    let slack = 10.0 * 5.0 * cell;
    let mut dominating = 0;
    support::for_each_grid_point(spec.action_lower(), &upper, 50, |x| {
        let (_, u) = evaluate(&spec, &ActionProfile(x.to_vec())).unwrap();
        if u.iter().zip(pb.utilities.iter()).all(|(g, p)| *g > p + slack) {
            dominating += 1;
        }
    });
    assert_eq!(dominating, 0);
}

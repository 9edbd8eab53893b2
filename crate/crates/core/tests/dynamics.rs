//! Randomized checks of the convergence theory behind the belief dynamics.

mod support;

use lcg_core::conjecture::ce_closed_form;
use lcg_core::dynamics::{best_response_map, run_dynamics, stability_analysis};
use lcg_core::equilibria::{pareto_type1, pareto_type2, weighted_log_utility};
use lcg_core::numerics::br_jacobian_matrix;
use lcg_core::{ActionProfile, DynamicsConfig, GameSpec, Outcome, Weights};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_lambda(rng: &mut ChaCha8Rng, spec: &GameSpec) -> Vec<f64> {
    spec.tau().iter().map(|t| t * rng.random_range(0.5..10.0)).collect()
}

#[test]
fn br_converges_iff_indicator_below_one() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let (mut stable, mut unstable) = (0, 0);
    while stable + unstable < 40 {
        let spec = support::random_type2(&mut rng, 2..=6);
        let lambda = random_lambda(&mut rng, &spec);
        let report = stability_analysis(&spec, &lambda).unwrap();
        if (report.condition_value - 1.0).abs() < 0.01 {
            continue;
        }
        assert_eq!(report.br_converges, report.spectrum.spectral_radius < 1.0);
        let start = support::random_in_box(&mut rng, &spec);
        let cfg = DynamicsConfig::best_response(start).with_clamp(false).with_tol(1e-8);
        let traj = run_dynamics(&spec, &lambda, &cfg).unwrap();
        assert_eq!(traj.outcome.is_converged(), report.br_converges, "{report:?}");
        if report.br_converges {
            stable += 1;
            let ce = ce_closed_form(&spec, &lambda).unwrap();
            let err = traj.final_actions().max_distance(&ce.actions);
            // linear convergence: remaining error ≤ step · ρ/(1−ρ)
            let rho = report.spectrum.spectral_radius;
            assert!(err <= 1e-8 * rho / (1.0 - rho) + 1e-12, "err {err}, rho {rho}");
        } else {
            unstable += 1;
        }
    }
    assert!(unstable > 0, "sampler produced no unstable beliefs");
}

#[test]
fn jacobian_is_independent_of_actions() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let spec = support::random_type2(&mut rng, 4..=4);
    let lambda = random_lambda(&mut rng, &spec);
    let analytic = br_jacobian_matrix(&spec, &lambda).unwrap();
    let h = 1e-6;
    for _ in 0..10 {
        let a = support::random_in_box(&mut rng, &spec);
        for k in 0..spec.n_users() {
            let mut hi = a.clone();
            let mut lo = a.clone();
            hi.0[k] += h;
            lo.0[k] -= h;
            let bh = best_response_map(&spec, &lambda, &hi).unwrap();
            let bl = best_response_map(&spec, &lambda, &lo).unwrap();
            for i in 0..spec.n_users() {
                let fd = (bh[i] - bl[i]) / (2.0 * h);
                assert!((fd - analytic[i][k]).abs() < 1e-6, "J[{i}][{k}]: {fd} vs {}", analytic[i][k]);
            }
        }
    }
}

#[test]
fn trajectories_are_deterministic() {
    let spec = GameSpec::type2(vec![1.5, 1.0, 0.5], vec![3.0, 4.0, 5.0], 10.0).unwrap();
    let lambda = [5.0, 9.0, 7.0];
    let cfg = DynamicsConfig::jacobi(vec![0.1, 0.9, 0.3], 0.7);
    let first = run_dynamics(&spec, &lambda, &cfg).unwrap();
    let second = run_dynamics(&spec, &lambda, &cfg).unwrap();
    assert_eq!(first, second);
    for (x, y) in first.records.iter().zip(&second.records) {
        for (a, b) in x.a.iter().zip(y.a.iter()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }
}

#[test]
fn records_follow_the_map() {
    let spec = GameSpec::type2(vec![2.0, 0.7], vec![1.0, 3.0], 6.0).unwrap();
    let lambda = [1.5, 6.0];
    let cfg = DynamicsConfig::best_response(vec![0.2, 0.2]).with_clamp(false);
    let traj = run_dynamics(&spec, &lambda, &cfg).unwrap();
    for pair in traj.records.windows(2) {
        assert_eq!(pair[1].t, pair[0].t + 1);
        let expected = best_response_map(&spec, &lambda, &pair[0].a).unwrap();
        assert_eq!(expected, pair[1].a);
    }
    if let Outcome::Converged { iterations } = traj.outcome {
        let n = traj.records.len();
        assert_eq!(iterations, n - 1);
        assert!(traj.records[n - 1].a.max_distance(&traj.records[n - 2].a) < cfg.tol);
    } else {
        panic!("{:?}", traj.outcome);
    }
}

#[test]
fn damped_jacobi_converges_even_when_br_does_not() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut divergent = 0;
    let mut cases = 0;
    while cases < 20 {
        let spec = support::random_type2(&mut rng, 2..=6);
        let lambda = random_lambda(&mut rng, &spec);
        let report = stability_analysis(&spec, &lambda).unwrap();
        if !report.br_converges {
            divergent += 1;
        } else if divergent < cases / 2 {
            continue;
        }
        cases += 1;
        let eps = (0.9 * report.jacobi_epsilon_bound).min(1.0);
        let cfg = DynamicsConfig::jacobi(support::random_in_box(&mut rng, &spec), eps).with_clamp(false);
        let traj = run_dynamics(&spec, &lambda, &cfg).unwrap();
        assert!(traj.outcome.is_converged(), "{:?} at eps {eps}", traj.outcome);
    }
    assert!(divergent >= 5);
}

#[test]
fn pareto_beliefs_converge_globally() {
    let spec = GameSpec::type2(vec![1.5, 1.0, 0.5], vec![3.0, 4.0, 5.0], 10.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..10 {
        let w = support::random_weights(&mut rng, 3);
        let lambda: Vec<f64> = spec.tau().iter().zip(w.iter()).map(|(t, w)| t / w).collect();
        let target = pareto_type2(&spec, &w).unwrap();
        let report = stability_analysis(&spec, &lambda).unwrap();
        assert!(report.condition_value < 0.5);
        assert!(report.spectrum.min_eigenvalue().abs() <= 1e-9);
        for _ in 0..5 {
            let cfg = DynamicsConfig::best_response(support::random_in_box(&mut rng, &spec)).with_clamp(false);
            let traj = run_dynamics(&spec, &lambda, &cfg).unwrap();
            assert!(traj.outcome.is_converged());
            assert!(traj.final_actions().max_distance(&target.actions) < 1e-6);
        }
    }
}

#[test]
fn asymmetric_type1_pareto_beats_grid() {
    let spec = GameSpec::type1(vec![2.0, 1.0], vec![1.0, 1.0], vec![1.0, 1.0]).unwrap();
    let w = Weights::uniform(2);
    let pb = pareto_type1(&spec, &w).unwrap();
    // a_m = β_m ω_m μ_m / (τ_m (1 − ω_m + β_m ω_m))
    assert!(pb.actions.max_distance(&[2.0 / 3.0, 0.5]) < 1e-12);
    assert!(pb.residual <= 1e-10);
    let best = weighted_log_utility(&spec, &w, &pb.actions).unwrap();
    let mut grid_best = f64::NEG_INFINITY;
    support::for_each_grid_point(&[0.0, 0.0], &[1.0, 1.0], 401, |x| {
        let v = weighted_log_utility(&spec, &w, &ActionProfile(x.to_vec())).unwrap();
        if v.is_finite() {
            grid_best = grid_best.max(v);
        }
    });
    assert!(grid_best <= best + 1e-12);
    assert!(best - grid_best < 1e-4);
}

use kw_bandit::experiment::{parse_config, ExperimentConfig};
use kw_bandit::regret::{
    bound_fixed_step, closed_form_distance_bound, monte_carlo_regret, normalized_regret_bound_kwl,
    run_trajectory, FixedStepInputs,
};
use kw_bandit::{
    ClassConstants, Domain, EnvironmentSchedule, FixedStepConfig, NoiseModel, ObjectiveSpec, Point,
    Policy, RandomStream, SlidingWindowConfig, WindowPolicy,
};
use proptest::prelude::*;

fn line() -> Domain {
    Domain::cube(1, -1.0, 1.0).unwrap()
}

fn alternating(domain: &Domain) -> Vec<ObjectiveSpec> {
    vec![
        ObjectiveSpec::quadratic(0.0, 1.0, [0.8], domain).unwrap(),
        ObjectiveSpec::quadratic(0.0, 1.0, [-0.8], domain).unwrap(),
    ]
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

// Reference totals below come from an independent scalar re-implementation.

#[test]
fn noiseless_fixed_step_across_changes() {
    let d = line();
    let env = EnvironmentSchedule::evenly_spaced(40, 4, &alternating(&d)).unwrap();
    let k = ClassConstants::new(2.0, 2.0, 1.0, 2.0).unwrap();
    let policy = Policy::FixedStep {
        config: FixedStepConfig::new(0.1, 0.2, 1.0, &k).unwrap(),
        x0: Point::from([0.0]),
    };
    let trace = run_trajectory(
        &policy,
        &env,
        &NoiseModel::none(),
        &mut RandomStream::new(0, 0),
    )
    .unwrap();
    assert!(rel(trace.total(), 19.463584727507378) < 1e-12);
}

#[test]
fn noiseless_restart_window_across_changes() {
    let d = line();
    let env = EnvironmentSchedule::evenly_spaced(40, 4, &alternating(&d)).unwrap();
    let cfg = SlidingWindowConfig::new(3, [0.0], 0.2, WindowPolicy::Restart, &d).unwrap();
    let trace = run_trajectory(
        &Policy::SlidingWindow(cfg),
        &env,
        &NoiseModel::none(),
        &mut RandomStream::new(0, 0),
    )
    .unwrap();
    assert!(rel(trace.total(), 17.553096601068304) < 1e-12);
}

#[test]
fn noiseless_vanilla_schedule() {
    let d = line();
    let f = ObjectiveSpec::quadratic(0.0, 1.0, [0.3], &d).unwrap();
    let env = EnvironmentSchedule::stationary(30, f).unwrap();
    let policy = Policy::Vanilla {
        x0: Point::from([-0.5]),
    };
    let trace = run_trajectory(
        &policy,
        &env,
        &NoiseModel::none(),
        &mut RandomStream::new(0, 0),
    )
    .unwrap();
    assert!(rel(trace.total(), 0.6587541816738071) < 1e-12);
}

#[test]
fn noisy_regret_stays_below_fixed_step_bound() {
    let d = Domain::cube(1, -2.0, 2.0).unwrap();
    let f = ObjectiveSpec::quadratic(0.0, 1.0, [0.0], &d).unwrap();
    let noise = NoiseModel::gaussian(1.0).unwrap();
    let config = FixedStepConfig::new(0.1, 0.1, 1.0, f.constants()).unwrap();
    let env = EnvironmentSchedule::stationary(1000, f.clone()).unwrap();
    let policy = Policy::FixedStep {
        config,
        x0: Point::from([1.0]),
    };
    let est = monte_carlo_regret(&policy, &env, &noise, 1000, 8).unwrap();
    let bound = bound_fixed_step(
        &FixedStepInputs::for_objective(&f, &noise, 0.1, 0.1),
        1000,
        1,
    )
    .unwrap();
    assert!(est.mean <= bound.value, "{} > {}", est.mean, bound.value);
}

#[test]
fn noiseless_regret_decays_geometrically() {
    // Quadratic bowl b, no noise: the iterate contracts by (1 − 2bβ) per
    // step, so R_T = Σ K3·x0_dist²·γ_exact^s with γ_exact = (1 − 2bβ)².
    let d = Domain::cube(2, -3.0, 3.0).unwrap();
    let b = 0.7;
    let beta = 0.2;
    let theta = [0.5, -1.0];
    let f = ObjectiveSpec::quadratic(1.0, b, theta, &d).unwrap();
    let x0 = Point::from([2.0, 1.0]);
    let x0_dist2 = x0.distance_squared(&Point::from(theta));
    let env = EnvironmentSchedule::stationary(60, f.clone()).unwrap();
    let policy = Policy::FixedStep {
        config: FixedStepConfig::new(beta, 0.3, 1.0, f.constants()).unwrap(),
        x0,
    };
    let trace = run_trajectory(
        &policy,
        &env,
        &NoiseModel::none(),
        &mut RandomStream::new(0, 0),
    )
    .unwrap();
    let g = (1.0 - 2.0 * b * beta).powi(2);
    let expected: f64 = (0..60).map(|s| b * x0_dist2 * g.powi(s)).sum();
    assert!(rel(trace.total(), expected) < 1e-12);
}

fn policies(domain: &Domain, x0: f64, beta: f64, window: usize) -> Vec<Policy> {
    let k = ClassConstants::new(2.0, 2.0, 1.0, 2.0).unwrap();
    vec![
        Policy::Vanilla {
            x0: Point::from([x0]),
        },
        Policy::FixedStep {
            config: FixedStepConfig::new(beta, 0.2, 1.0, &k).unwrap(),
            x0: Point::from([x0]),
        },
        Policy::SlidingWindow(
            SlidingWindowConfig::new(window, [x0], 0.2, WindowPolicy::Restart, domain).unwrap(),
        ),
        Policy::SlidingWindow(
            SlidingWindowConfig::new(window, [x0], 0.2, WindowPolicy::Slide, domain).unwrap(),
        ),
        Policy::Oracle,
        Policy::Static {
            x: Point::from([x0]),
        },
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn trace_invariants(
        horizon in 1u64..300,
        episodes_frac in 0.0f64..1.0,
        x0 in -1.0f64..1.0,
        beta in 0.01f64..0.45,
        window in 1usize..20,
        sigma2 in 0.0f64..2.0,
        seed in any::<u64>(),
    ) {
        let d = line();
        let episodes = 1 + ((horizon - 1) as f64 * episodes_frac) as u64;
        let env = EnvironmentSchedule::evenly_spaced(horizon, episodes, &alternating(&d)).unwrap();
        let noise = NoiseModel::gaussian(sigma2).unwrap();
        for policy in policies(&d, x0, beta, window) {
            let trace = run_trajectory(&policy, &env, &noise, &mut RandomStream::new(seed, 0)).unwrap();
            prop_assert_eq!(trace.len() as u64, horizon);
            let mut cum = 0.0;
            for (i, r) in trace.records.iter().enumerate() {
                prop_assert_eq!(r.step, i as u64 + 1);
                prop_assert!(r.inst_regret >= 0.0);
                prop_assert!(d.contains(&r.action));
                cum += r.inst_regret;
                prop_assert_eq!(r.cum_regret, cum);
                prop_assert_eq!(r.episode, env.episode_of(r.step).unwrap());
            }
            let per_episode: f64 = trace.per_episode().iter().sum();
            prop_assert!((per_episode - trace.total()).abs() <= 1e-9 * trace.total().max(1.0));
            if matches!(policy, Policy::Oracle) {
                prop_assert_eq!(trace.total(), 0.0);
            }
        }
    }

    #[test]
    fn monte_carlo_is_reproducible(seed in any::<u64>(), reps in 2u64..12) {
        let d = line();
        let env = EnvironmentSchedule::evenly_spaced(80, 3, &alternating(&d)).unwrap();
        let noise = NoiseModel::gaussian(1.0).unwrap();
        let policy = policies(&d, 0.0, 0.1, 5).swap_remove(1);
        let a = monte_carlo_regret(&policy, &env, &noise, reps, seed).unwrap();
        let b = monte_carlo_regret(&policy, &env, &noise, reps, seed).unwrap();
        prop_assert_eq!(a.mean.to_bits(), b.mean.to_bits());
        prop_assert_eq!(a.standard_error.to_bits(), b.standard_error.to_bits());
    }

    #[test]
    fn bounds_are_finite_and_non_negative(
        beta in 0.001f64..0.2,
        c in 0.05f64..1.0,
        sigma_tilde2 in 0.0f64..10.0,
        s in 0u64..10_000,
        x0_dist2 in 0.0f64..10.0,
        horizon in 0u64..1_000_000,
        episodes in 1u64..100,
    ) {
        let inputs = FixedStepInputs {
            constants: ClassConstants::new(2.0, 2.0, 1.0, 2.0).unwrap(),
            beta,
            c,
            sigma_tilde2,
            diameter: 2.0,
            epsilon: 0.0,
        };
        let dist = closed_form_distance_bound(&inputs, s, x0_dist2).unwrap().value;
        prop_assert!(dist.is_finite() && dist >= 0.0);
        let r = bound_fixed_step(&inputs, horizon, episodes).unwrap().value;
        prop_assert!(r.is_finite() && r >= 0.0);
    }

    #[test]
    fn kwl_bound_increases_with_change_rate(k5 in 0.01f64..10.0, diameter in 0.1f64..10.0, a in 1u64..500, extra in 1u64..500) {
        let horizon = 1000;
        let lo = normalized_regret_bound_kwl(k5, diameter, horizon, a).unwrap().value;
        let hi = normalized_regret_bound_kwl(k5, diameter, horizon, (a + extra).min(horizon)).unwrap().value;
        prop_assert!(hi > lo);
    }

    #[test]
    fn config_round_trips(
        beta in 0.01f64..0.4,
        c in 0.01f64..1.0,
        horizon in 1u64..100_000,
        reps in 1u64..1000,
        seed in any::<u64>(),
        theta in -1.0f64..1.0,
    ) {
        let text = format!(r#"{{
            "domain": {{"lower": [-1.0], "upper": [1.0]}},
            "objectives": [{{"kind": "quadratic", "curvature": 1.0, "theta": [{theta:?}]}}],
            "schedule": {{"type": "stationary"}},
            "noise": {{"kind": "gaussian", "sigma2": 0.5}},
            "algorithm": {{"variant": "fixed_step", "beta": {beta:?}, "c": {c:?}}},
            "horizon": {horizon},
            "replications": {reps},
            "base_seed": {seed}
        }}"#);
        let cfg: ExperimentConfig = parse_config(&text).unwrap();
        prop_assert_eq!(parse_config(&cfg.to_json()).unwrap(), cfg);
    }
}

//! Acceptance suite. Each test prints one PASS/FAIL line to stderr, outside
//! the test harness's output capture, so the lines appear in a plain
//! `cargo test` log.

use std::io::Write;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use kw_bandit::bandit::{verify_conditions, Condition};
use kw_bandit::experiment::{parse_config, run_experiment, run_sweep, SweepOutcome};
use kw_bandit::kw::{estimate_gradient, tuning};
use kw_bandit::regret::bounds::sliding_window_terms;
use kw_bandit::regret::{
    bound_fixed_step, bound_sliding_window, calibrate_k5, lemma2_recursion_check,
    monte_carlo_regret, run_trajectory, FixedStepInputs,
};
use kw_bandit::{
    ClassConstants, Domain, EnvironmentSchedule, FixedStepConfig, NoiseModel, ObjectiveSpec, Point,
    Policy, RandomStream, SlidingWindowConfig, WindowPolicy,
};

fn report(id: u32, title: &str, pass: bool, elapsed: Duration, detail: &str) {
    let status = if pass { "PASS" } else { "FAIL" };
    let line = format!(
        "acceptance {id:>2} [{status}] {title} ({:.2}s): {detail}\n",
        elapsed.as_secs_f64()
    );
    let _ = std::io::stderr().write_all(line.as_bytes());
    assert!(pass, "{}", line.trim_end());
}

#[test]
fn criterion_01_condition_verification() {
    let start = Instant::now();
    let mut pass = true;
    let mut notes = Vec::new();
    for dim in 1..=3 {
        let domain = Domain::cube(dim, -1.0, 1.0).unwrap();
        let theta: Point = (0..dim)
            .map(|i| if i % 2 == 0 { 0.3 } else { -0.4 })
            .collect();
        let b = 1.5;
        let f = ObjectiveSpec::quadratic(2.0, b, theta, &domain).unwrap();
        let exact = ClassConstants::new(2.0 * b, 2.0 * b, b, 2.0 * b).unwrap();
        let base = verify_conditions(&f, &exact, &domain, 16).unwrap();
        pass &= base.all_hold();

        // K1 is a lower constant: raising it tightens the condition.
        let k1_up = ClassConstants {
            k1: exact.k1 * 1.5,
            ..exact
        };
        let r = verify_conditions(&f, &k1_up, &domain, 16).unwrap();
        let k1_fails = !r.check(Condition::ConcavityLike).holds();
        // K2, K3, K4 are upper constants: the tightening perturbation is a decrease.
        let tightened = [
            (
                Condition::LinearGrowth,
                ClassConstants {
                    k2: exact.k2 / 1.5,
                    ..exact
                },
            ),
            (
                Condition::QuadraticBound,
                ClassConstants {
                    k3: exact.k3 / 1.5,
                    ..exact
                },
            ),
            (
                Condition::LocalLipschitz,
                ClassConstants {
                    k4: exact.k4 / 1.5,
                    ..exact
                },
            ),
        ];
        let others_fail = tightened.iter().all(|(cond, k)| {
            !verify_conditions(&f, k, &domain, 16)
                .unwrap()
                .check(*cond)
                .holds()
        });
        let loosened = ClassConstants {
            k2: exact.k2 * 1.5,
            k3: exact.k3 * 1.5,
            k4: exact.k4 * 1.5,
            ..exact
        };
        let loose_ok = verify_conditions(&f, &loosened, &domain, 16)
            .unwrap()
            .all_hold();
        pass &= k1_fails && others_fail && loose_ok;
        notes.push(format!(
            "d={dim}: exact ok={}, tightened K1..K4 all fail={}",
            base.all_hold(),
            k1_fails && others_fail
        ));
    }
    let elapsed = start.elapsed();
    pass &= elapsed < Duration::from_secs(1);
    report(
        1,
        "condition verification",
        pass,
        elapsed,
        &notes.join("; "),
    );
}

#[test]
fn criterion_02_noiseless_contraction() {
    let start = Instant::now();
    let domain = Domain::cube(1, -2.0, 2.0).unwrap();
    let f = ObjectiveSpec::quadratic(0.0, 1.0, [0.0], &domain).unwrap();
    let config = FixedStepConfig::new(0.1, 0.1, 1.0, f.constants()).unwrap();
    let horizon = 200;
    let env = EnvironmentSchedule::stationary(horizon, f).unwrap();
    let policy = Policy::FixedStep {
        config,
        x0: Point::from([1.0]),
    };
    let mut rng = RandomStream::new(0, 0);
    let trace = run_trajectory(&policy, &env, &NoiseModel::none(), &mut rng).unwrap();
    // The action at step s + 1 is the iterate after s updates.
    let worst = (0..=50)
        .map(|s| (trace.records[s].action[0] - 0.8f64.powi(s as i32)).abs())
        .fold(0.0, f64::max);
    let closed = (1.0 - 0.64f64.powi(horizon as i32)) / 0.36;
    let rel = ((trace.total() - closed) / closed).abs();
    let pass = worst <= 1e-12 && rel <= 1e-9;
    report(
        2,
        "exact noiseless contraction",
        pass,
        start.elapsed(),
        &format!("max |X_s − 0.8^s| = {worst:.3e}, regret rel. error = {rel:.3e}"),
    );
}

#[test]
fn criterion_03_gradient_estimator_order() {
    let start = Instant::now();
    let domain = Domain::cube(2, -1.0, 1.0).unwrap();
    let f = ObjectiveSpec::quartic(1.0, 1.0, 0.5, [0.1, -0.2], &domain).unwrap();
    let x = [0.4, 0.3];
    let grad = f.gradient(&x).unwrap();
    let mut rng = RandomStream::new(0, 0);
    let errs: Vec<f64> = [0.2, 0.1, 0.05]
        .iter()
        .map(|&c| {
            let est = estimate_gradient(&f, &NoiseModel::none(), &x, c, &mut rng).unwrap();
            assert!(!est.boundary_contact);
            est.y.distance(&grad)
        })
        .collect();
    let ratios = [errs[0] / errs[1], errs[1] / errs[2]];
    let elapsed = start.elapsed();
    let pass = ratios.iter().all(|r| (3.5..=4.5).contains(r)) && elapsed < Duration::from_secs(1);
    report(
        3,
        "gradient-estimator order",
        pass,
        elapsed,
        &format!("errors {errs:.3?}, halving ratios {ratios:.4?}"),
    );
}

#[test]
fn criterion_04_lemma2_recursion() {
    let start = Instant::now();
    let domain = Domain::cube(1, -2.0, 2.0).unwrap();
    let f = ObjectiveSpec::quadratic(0.0, 1.0, [0.0], &domain).unwrap();
    let config = FixedStepConfig::new(0.1, 0.1, 1.0, f.constants()).unwrap();
    let noise = NoiseModel::gaussian(1.0).unwrap();
    let mut pass = true;
    let mut notes = Vec::new();
    for s in [1, 5, 20] {
        let r = lemma2_recursion_check(&config, &Point::from([1.0]), &f, &noise, s, 10_000, 2024)
            .unwrap();
        pass &= r.holds;
        notes.push(format!(
            "s={s}: {:.4} <= {:.4}·{:.4} + {:.4} (+3SE {:.4})",
            r.lhs(),
            r.gamma,
            r.distance_s.mean,
            r.h,
            3.0 * r.combined_standard_error
        ));
    }
    let elapsed = start.elapsed();
    pass &= elapsed < Duration::from_secs(60);
    report(
        4,
        "one-step distance recursion",
        pass,
        elapsed,
        &notes.join("; "),
    );
}

fn alternating_bowls(domain: &Domain) -> Vec<ObjectiveSpec> {
    vec![
        ObjectiveSpec::quadratic(0.0, 1.0, [0.8], domain).unwrap(),
        ObjectiveSpec::quadratic(0.0, 1.0, [-0.8], domain).unwrap(),
    ]
}

#[test]
fn criterion_05_bound_domination() {
    let start = Instant::now();
    let domain = Domain::cube(1, -1.0, 1.0).unwrap();
    let bowls = alternating_bowls(&domain);
    let constants = *bowls[0].constants();
    let diameter = domain.diameter();
    let x0 = Point::from([0.0]);
    let replications = 200;
    let mut pass = true;
    let mut worst_ratio = 0.0f64;
    let mut rows = 0;
    for (ni, sigma2) in [0.25, 1.0].into_iter().enumerate() {
        let noise = NoiseModel::gaussian(sigma2).unwrap();
        let k5 = calibrate_k5(
            &bowls,
            &noise,
            &x0,
            0.2,
            &[4, 16, 64, 256, 1024],
            100,
            500 + ni as u64,
        )
        .unwrap()
        .k5;
        let with_k5 = constants.with_k5(k5).unwrap();
        for horizon in [1_000u64, 10_000, 30_000] {
            for episodes in [1u64, 10] {
                let env = EnvironmentSchedule::evenly_spaced(horizon, episodes, &bowls).unwrap();
                let seed = horizon + episodes;

                let beta =
                    tuning::beta_star(diameter, noise.sigma_tilde2(1), 1.0, horizon, episodes)
                        .unwrap();
                let config = FixedStepConfig::new(beta, 0.25, 1.0, &constants).unwrap();
                let fixed = Policy::FixedStep {
                    config,
                    x0: x0.clone(),
                };
                let est = monte_carlo_regret(&fixed, &env, &noise, replications, seed).unwrap();
                let inputs = FixedStepInputs::for_environment(&env, &noise, beta, 0.25);
                let bound = bound_fixed_step(&inputs, horizon, episodes).unwrap().value;
                pass &= est.mean <= bound;
                worst_ratio = worst_ratio.max(est.mean / bound);

                let window = tuning::l_star(k5, diameter, horizon, episodes).unwrap();
                let cfg = SlidingWindowConfig::new(
                    window,
                    x0.clone(),
                    0.2,
                    WindowPolicy::Restart,
                    &domain,
                )
                .unwrap();
                let est = monte_carlo_regret(
                    &Policy::SlidingWindow(cfg),
                    &env,
                    &noise,
                    replications,
                    seed,
                )
                .unwrap();
                let bound = bound_sliding_window(&with_k5, diameter, window, horizon, episodes)
                    .unwrap()
                    .value;
                pass &= est.mean <= bound;
                worst_ratio = worst_ratio.max(est.mean / bound);
                rows += 2;
            }
        }
    }
    let elapsed = start.elapsed();
    pass &= elapsed < Duration::from_secs(600);
    report(
        5,
        "bound domination",
        pass,
        elapsed,
        &format!("{rows} (variant, grid point) pairs, largest mean/bound = {worst_ratio:.3}"),
    );
}

const STATIONARY_SWEEP: &str = r#"{
    "domain": {"lower": [-1.0], "upper": [1.0]},
    "objectives": [{"kind": "quadratic", "curvature": 1.0, "theta": [0.0]}],
    "schedule": {"type": "stationary"},
    "noise": {"kind": "gaussian", "sigma2": 1.0},
    "algorithm": {"variant": "fixed_step", "beta": "auto", "c": 0.25, "alpha": 1.0, "x0": [1.0], "delta_t": 1},
    "constants": {"k1": 2.0, "k2": 2.0, "k3": 1.0, "k4": 2.0},
    "horizon": 1000,
    "replications": 200,
    "base_seed": 11,
    "sweep": {"axis": "T", "values": [1000, 10000, 100000]}
}"#;

#[test]
fn criterion_06_stationary_beta_star_scaling() {
    let start = Instant::now();
    let cfg = parse_config(STATIONARY_SWEEP).unwrap();
    let out = run_sweep(&cfg).unwrap();
    let per_step: Vec<f64> = out.rows.iter().map(|r| r.regret_per_step()).collect();
    let elapsed = start.elapsed();
    let pass = (-0.48..=-0.20).contains(&out.fit.slope) && elapsed < Duration::from_secs(900);
    report(
        6,
        "stationary KW_β* scaling",
        pass,
        elapsed,
        &format!(
            "slope {:.4} (r² {:.4}), R_T/T = {per_step:.5?}",
            out.fit.slope, out.fit.r2
        ),
    );
}

const WINDOW_SWEEP: &str = r#"{
    "domain": {"lower": [-1.0], "upper": [1.0]},
    "objectives": [
        {"kind": "quadratic", "curvature": 1.0, "theta": [0.8]},
        {"kind": "quadratic", "curvature": 1.0, "theta": [-0.8]}
    ],
    "schedule": {"type": "evenly_spaced", "episodes": 4},
    "noise": {"kind": "gaussian", "sigma2": 1.0},
    "algorithm": {"variant": "sliding_window", "window": "auto", "c": 0.2, "x0": [0.0], "delta_t": 4},
    "constants": {"k1": 2.0, "k2": 2.0, "k3": 1.0, "k4": 2.0, "k5": "calibrate"},
    "calibration": {"windows": [4, 16, 64, 256], "replications": 100},
    "horizon": 100000,
    "replications": 100,
    "base_seed": 13,
    "sweep": {"axis": "delta_T", "values": [4, 16, 64, 256]}
}"#;

fn window_sweep() -> &'static (SweepOutcome, Duration) {
    static OUTCOME: OnceLock<(SweepOutcome, Duration)> = OnceLock::new();
    OUTCOME.get_or_init(|| {
        let start = Instant::now();
        let cfg = parse_config(WINDOW_SWEEP).unwrap();
        let out = run_sweep(&cfg).unwrap();
        (out, start.elapsed())
    })
}

#[test]
fn criterion_07_nonstationary_l_star_scaling() {
    let (out, elapsed) = window_sweep();
    let windows: Vec<usize> = out.rows.iter().map(|r| r.tuning.window.unwrap()).collect();
    let pass = (0.18..=0.48).contains(&out.fit.slope) && *elapsed < Duration::from_secs(1200);
    report(
        7,
        "non-stationary KW_L* scaling",
        pass,
        *elapsed,
        &format!(
            "slope {:.4} (r² {:.4}), K5 = {:.4}, L* = {windows:?}",
            out.fit.slope,
            out.fit.r2,
            out.rows[0].tuning.k5.unwrap()
        ),
    );
}

#[test]
fn criterion_08_asymptotic_efficiency_trend() {
    let start = Instant::now();
    let (out, _) = window_sweep();
    // Rows are in increasing Δ_T; read backwards for decreasing Δ_T/T.
    let per_step: Vec<f64> = out.rows.iter().rev().map(|r| r.regret_per_step()).collect();
    let pass = per_step.windows(2).all(|w| w[1] < w[0]);
    report(
        8,
        "asymptotic-efficiency trend",
        pass,
        start.elapsed(),
        &format!("R_T/T for Δ_T = 256, 64, 16, 4: {per_step:.5?}"),
    );
}

#[test]
fn criterion_09_tuning_calculators() {
    let start = Instant::now();
    let beta = tuning::beta_star(2.0, 4.0, 1.0, 1000, 8).unwrap();
    let window = tuning::l_star(16.0, 1.0, 1000, 8).unwrap();
    let l_real = tuning::l_star_real(16.0, 1.0, 1000, 8).unwrap();
    let (a, b) = sliding_window_terms(1.0, 16.0, 1.0, l_real, 1000, 8);
    let ratio = a / b;
    let pass = (beta - 0.2).abs() <= 1e-15 && window == 100 && (ratio - 2.0).abs() <= 1e-9;
    report(
        9,
        "tuning calculators",
        pass,
        start.elapsed(),
        &format!("β* = {beta}, L* = {window} (real {l_real}), term ratio = {ratio}"),
    );
}

const DETERMINISM: &str = r#"{
    "domain": {"lower": [-1.0, -1.0], "upper": [1.0, 1.0]},
    "objectives": [
        {"kind": "quadratic", "curvature": [1.0, 2.0], "theta": [0.5, 0.5]},
        {"kind": "quartic", "b": 1.0, "q": 0.05, "theta": [-0.5, 0.2]}
    ],
    "schedule": {"type": "evenly_spaced", "episodes": 5},
    "noise": {"kind": "gaussian", "sigma2": 1.0},
    "algorithm": {"variant": "sliding_window", "window": "auto", "c": 0.2, "x0": [0.0, 0.0], "delta_t": 5},
    "constants": {"k1": 2.0, "k2": 4.5, "k3": 2.0, "k4": 5.0, "k5": "calibrate"},
    "calibration": {"windows": [4, 16], "replications": 40},
    "horizon": 5000,
    "replications": 64,
    "base_seed": 99
}"#;

#[test]
fn criterion_10_determinism() {
    let start = Instant::now();
    let mut pass = true;
    let mut notes = Vec::new();
    let fixed = DETERMINISM
        .replace(
            "\"variant\": \"sliding_window\", \"window\": \"auto\"",
            "\"variant\": \"fixed_step\", \"beta\": 0.05",
        )
        .replace(", \"k5\": \"calibrate\"", "")
        .replace(
            "\"calibration\": {\"windows\": [4, 16], \"replications\": 40},",
            "",
        );
    for (label, text) in [
        ("sliding_window", DETERMINISM.to_string()),
        ("fixed_step", fixed),
    ] {
        let cfg = parse_config(&text).unwrap();
        let one = tempfile::tempdir().unwrap();
        let eight = tempfile::tempdir().unwrap();
        let a = run_experiment(&cfg, one.path(), 1).unwrap();
        let b = run_experiment(&cfg, eight.path(), 8).unwrap();
        let same_trace =
            std::fs::read(&a.trace_path).unwrap() == std::fs::read(&b.trace_path).unwrap();
        let same_summary =
            std::fs::read(&a.summary_path).unwrap() == std::fs::read(&b.summary_path).unwrap();
        pass &= same_trace && same_summary;
        notes.push(format!(
            "{label}: trace identical={same_trace}, summary identical={same_summary}"
        ));
    }
    report(
        10,
        "determinism across thread counts",
        pass,
        start.elapsed(),
        &notes.join("; "),
    );
}

use crate::bandit::{EnvironmentSchedule, NoiseModel, Point};
use crate::error::Result;
use crate::kw::{estimate_gradient, Policy};
use crate::rng::RandomStream;

/// Per-step record of a trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub step: u64,
    /// Zero-based episode index.
    pub episode: usize,
    pub action: Point,
    /// `f_s(θ_s) − f_s(X_s)`.
    pub inst_regret: f64,
    pub cum_regret: f64,
    /// Squared distance `‖X_s − θ_s‖²`.
    pub distance2: f64,
    pub boundary_contact: bool,
}

/// Full per-step history of one trajectory.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RegretTrace {
    pub records: Vec<StepRecord>,
}

impl RegretTrace {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// `R_T`, the cumulative regret at the last step.
    pub fn total(&self) -> f64 {
        self.records.last().map_or(0.0, |r| r.cum_regret)
    }

    /// Regret summed within each episode, in episode order.
    pub fn per_episode(&self) -> Vec<f64> {
        let mut out: Vec<f64> = Vec::new();
        for r in &self.records {
            if out.len() <= r.episode {
                out.resize(r.episode + 1, 0.0);
            }
            out[r.episode] += r.inst_regret;
        }
        out
    }
}

/// Runs `policy` against `env` for `steps` steps (at most the horizon),
/// calling `observe` after every step. Returns the cumulative regret.
///
/// The regret uses the true `f_s`; the policy only sees noisy rewards.
pub fn simulate(
    policy: &Policy,
    env: &EnvironmentSchedule,
    noise: &NoiseModel,
    rng: &mut RandomStream,
    steps: u64,
    mut observe: impl FnMut(&StepRecord),
) -> Result<f64> {
    let objectives = env.objectives();
    let domain = objectives[0].domain();
    let change_times = env.change_times();
    let mut state = policy.initial_state(domain)?;
    let mut episode = 0usize;
    let mut record = StepRecord {
        step: 0,
        episode: 0,
        action: Point::zeros(env.dim()),
        inst_regret: 0.0,
        cum_regret: 0.0,
        distance2: 0.0,
        boundary_contact: false,
    };
    for s in 1..=steps.min(env.horizon()) {
        while episode + 1 < change_times.len() && change_times[episode + 1] <= s {
            episode += 1;
        }
        let f = &objectives[episode];
        record.action.clone_from(match (policy, &state) {
            (Policy::Oracle, _) => f.theta(),
            (Policy::Static { x }, _) => x,
            (_, Some(st)) => st.current_x(),
            (_, None) => unreachable!("learning policies always carry state"),
        });
        record.step = s;
        record.episode = episode;
        record.inst_regret = f.gap(&record.action);
        record.cum_regret += record.inst_regret;
        record.distance2 = record.action.distance_squared(f.theta());
        record.boundary_contact = false;

        if let Some(st) = state.as_mut() {
            match policy {
                Policy::Vanilla { .. } => {
                    let c = st.vanilla_perturbation();
                    let est = estimate_gradient(f, noise, &record.action, c, rng)?;
                    record.boundary_contact = est.boundary_contact;
                    st.step_vanilla(&est, domain)?;
                }
                Policy::FixedStep { config, .. } => {
                    let est = estimate_gradient(f, noise, &record.action, config.c(), rng)?;
                    record.boundary_contact = est.boundary_contact;
                    st.step_fixed(&est, config, domain)?;
                }
                Policy::SlidingWindow(cfg) => {
                    let est = estimate_gradient(f, noise, &record.action, cfg.c(), rng)?;
                    record.boundary_contact = est.boundary_contact;
                    st.sliding_window_advance(est, cfg, domain)?;
                }
                Policy::Oracle | Policy::Static { .. } => {}
            }
        }
        observe(&record);
    }
    Ok(record.cum_regret)
}

/// Executes all `T` steps and keeps the full trace.
pub fn run_trajectory(
    policy: &Policy,
    env: &EnvironmentSchedule,
    noise: &NoiseModel,
    rng: &mut RandomStream,
) -> Result<RegretTrace> {
    let mut records = Vec::with_capacity(env.horizon() as usize);
    simulate(policy, env, noise, rng, env.horizon(), |r| {
        records.push(r.clone())
    })?;
    Ok(RegretTrace { records })
}

/// `R_T` of one trajectory without storing the trace.
pub fn total_regret(
    policy: &Policy,
    env: &EnvironmentSchedule,
    noise: &NoiseModel,
    rng: &mut RandomStream,
) -> Result<f64> {
    simulate(policy, env, noise, rng, env.horizon(), |_| {})
}

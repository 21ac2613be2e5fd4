use crate::bandit::{ClassConstants, EnvironmentSchedule, NoiseModel, ObjectiveSpec, Point};
use crate::error::{Error, Result};
use crate::kw::{tuning, FixedStepConfig, Policy, SlidingWindowConfig, WindowPolicy};
use crate::regret::monte_carlo::{distance_samples, mean_distance, MonteCarloEstimate};

/// Which theoretical bound a [`BoundReport`] evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundName {
    Lemma2Recursion,
    ClosedFormDistance,
    FixedStepStationary,
    FixedStepNonstationary,
    SlidingWindowPerEpisode,
    SlidingWindowTotal,
    NormalizedRegretKwb,
    NormalizedRegretKwl,
}

impl BoundName {
    pub const ALL: [BoundName; 8] = [
        BoundName::Lemma2Recursion,
        BoundName::ClosedFormDistance,
        BoundName::FixedStepStationary,
        BoundName::FixedStepNonstationary,
        BoundName::SlidingWindowPerEpisode,
        BoundName::SlidingWindowTotal,
        BoundName::NormalizedRegretKwb,
        BoundName::NormalizedRegretKwl,
    ];

    pub fn label(self) -> &'static str {
        match self {
            BoundName::Lemma2Recursion => "lemma2-recursion",
            BoundName::ClosedFormDistance => "closed-form-distance",
            BoundName::FixedStepStationary => "fixed-step-stationary",
            BoundName::FixedStepNonstationary => "fixed-step-nonstationary",
            BoundName::SlidingWindowPerEpisode => "sliding-window-per-episode",
            BoundName::SlidingWindowTotal => "sliding-window-total",
            BoundName::NormalizedRegretKwb => "normalized-regret-kwb",
            BoundName::NormalizedRegretKwl => "normalized-regret-kwl",
        }
    }

    pub fn from_label(label: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|b| b.label() == label)
    }
}

impl std::fmt::Display for BoundName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// An evaluated bound together with the inputs it was computed from.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub name: BoundName,
    pub value: f64,
    pub inputs: Vec<(&'static str, f64)>,
}

impl BoundReport {
    fn new(name: BoundName, value: f64, inputs: Vec<(&'static str, f64)>) -> Result<Self> {
        if !(value.is_finite() && value >= 0.0) {
            return Err(Error::param(
                "bound",
                format!("{name} evaluated to {value}"),
            ));
        }
        Ok(Self {
            name,
            value,
            inputs,
        })
    }

    pub fn input(&self, key: &str) -> Option<f64> {
        self.inputs.iter().find(|(k, _)| *k == key).map(|(_, v)| *v)
    }
}

fn check_positive(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::param(name, format!("must be positive, got {v}")))
    }
}

/// Everything the fixed-step bounds depend on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedStepInputs {
    pub constants: ClassConstants,
    pub beta: f64,
    pub c: f64,
    pub sigma_tilde2: f64,
    /// Domain diameter K.
    pub diameter: f64,
    /// Mean-value offset ε.
    pub epsilon: f64,
}

impl FixedStepInputs {
    /// Inputs for a single objective: its analytic constants and offset.
    pub fn for_objective(f: &ObjectiveSpec, noise: &NoiseModel, beta: f64, c: f64) -> Self {
        Self {
            constants: *f.constants(),
            beta,
            c,
            sigma_tilde2: noise.sigma_tilde2(f.dim()),
            diameter: f.domain().diameter(),
            epsilon: f.mean_value_offset(c),
        }
    }

    /// Inputs valid for every episode: the constant envelope and largest ε.
    pub fn for_environment(
        env: &EnvironmentSchedule,
        noise: &NoiseModel,
        beta: f64,
        c: f64,
    ) -> Self {
        let objs = env.objectives();
        let constants = ClassConstants::envelope(objs.iter().map(|f| *f.constants()))
            .expect("schedules hold at least one objective");
        let epsilon = objs
            .iter()
            .map(|f| f.mean_value_offset(c))
            .fold(0.0, f64::max);
        Self {
            constants,
            beta,
            c,
            sigma_tilde2: noise.sigma_tilde2(env.dim()),
            diameter: objs[0].domain().diameter(),
            epsilon,
        }
    }

    pub fn gamma(&self) -> Result<f64> {
        tuning::gamma(self.beta, self.constants.k1, self.constants.k2)
    }

    pub fn h(&self) -> Result<f64> {
        tuning::h_beta(
            self.beta,
            self.c,
            self.sigma_tilde2,
            self.diameter,
            self.constants.k4,
            self.constants.k2,
            self.epsilon,
        )
    }

    fn echo(&self, gamma: f64, h: f64) -> Vec<(&'static str, f64)> {
        vec![
            ("beta", self.beta),
            ("c", self.c),
            ("k1", self.constants.k1),
            ("k2", self.constants.k2),
            ("k3", self.constants.k3),
            ("k4", self.constants.k4),
            ("sigma_tilde2", self.sigma_tilde2),
            ("diameter", self.diameter),
            ("epsilon", self.epsilon),
            ("gamma", gamma),
            ("h", h),
        ]
    }
}

/// `H·(1−γ^s)/(1−γ) + x0_dist2·γ^s`.
pub fn distance_bound(h: f64, gamma: f64, s: u64, x0_dist2: f64) -> Result<f64> {
    if gamma.is_nan() || gamma >= 1.0 {
        return Err(Error::ContractionViolation { gamma });
    }
    let g_s = gamma.powf(s as f64);
    Ok(h * (1.0 - g_s) / (1.0 - gamma) + x0_dist2 * g_s)
}

/// Bound on `E‖X_s − θ‖²` after `s` fixed-step updates.
pub fn closed_form_distance_bound(
    inputs: &FixedStepInputs,
    s: u64,
    x0_dist2: f64,
) -> Result<BoundReport> {
    let gamma = inputs.gamma()?;
    let h = inputs.h()?;
    let mut echo = inputs.echo(gamma, h);
    echo.extend([("s", s as f64), ("x0_dist2", x0_dist2)]);
    BoundReport::new(
        BoundName::ClosedFormDistance,
        distance_bound(h, gamma, s, x0_dist2)?,
        echo,
    )
}

/// `H·K3·T/(1−γ) + K²·Δ_T·K3/(1−γ)`.
pub fn fixed_step_bound(
    h: f64,
    gamma: f64,
    k3: f64,
    diameter: f64,
    horizon: u64,
    episodes: u64,
) -> Result<f64> {
    if gamma.is_nan() || gamma >= 1.0 {
        return Err(Error::ContractionViolation { gamma });
    }
    if episodes == 0 {
        return Err(Error::param("delta_t", "must be at least 1"));
    }
    let denom = 1.0 - gamma;
    Ok(h * k3 * horizon as f64 / denom + diameter * diameter * episodes as f64 * k3 / denom)
}

/// Regret bound of the fixed-step rule over `T` steps and `Δ_T` episodes.
pub fn bound_fixed_step(
    inputs: &FixedStepInputs,
    horizon: u64,
    episodes: u64,
) -> Result<BoundReport> {
    let gamma = inputs.gamma()?;
    let h = inputs.h()?;
    let value = fixed_step_bound(
        h,
        gamma,
        inputs.constants.k3,
        inputs.diameter,
        horizon,
        episodes,
    )?;
    let name = if episodes == 1 {
        BoundName::FixedStepStationary
    } else {
        BoundName::FixedStepNonstationary
    };
    let mut echo = inputs.echo(gamma, h);
    echo.extend([("horizon", horizon as f64), ("delta_t", episodes as f64)]);
    BoundReport::new(name, value, echo)
}

/// `bound_fixed_step / T` evaluated at `β*`.
pub fn normalized_regret_bound_kwb(
    inputs: &FixedStepInputs,
    alpha: f64,
    horizon: u64,
    episodes: u64,
) -> Result<BoundReport> {
    let beta = tuning::beta_star(
        inputs.diameter,
        inputs.sigma_tilde2,
        alpha,
        horizon,
        episodes,
    )?;
    let at_star = FixedStepInputs { beta, ..*inputs };
    let report = bound_fixed_step(&at_star, horizon, episodes)?;
    let mut echo = report.inputs;
    echo.push(("alpha", alpha));
    BoundReport::new(
        BoundName::NormalizedRegretKwb,
        report.value / horizon as f64,
        echo,
    )
}

/// The two terms `(K3·K5·T/√L, L·K3·K·Δ_T)` of the sliding-window bound,
/// with `L` allowed to be real.
pub fn sliding_window_terms(
    k3: f64,
    k5: f64,
    diameter: f64,
    window: f64,
    horizon: u64,
    episodes: u64,
) -> (f64, f64) {
    (
        k3 * k5 * horizon as f64 / window.sqrt(),
        window * k3 * diameter * episodes as f64,
    )
}

fn window_constants(constants: &ClassConstants, window: usize) -> Result<f64> {
    if window == 0 {
        return Err(Error::param("window", "must be at least 1"));
    }
    if (window as u64) <= constants.s0 && constants.s0 > 0 {
        return Err(Error::param(
            "window",
            format!("must exceed s0 = {}, got {window}", constants.s0),
        ));
    }
    constants.require_k5()
}

/// Regret of the sliding-window rule within one episode of `length` steps:
/// `K3·K5·length/√L + L·K3·K`.
pub fn bound_sliding_window_episode(
    constants: &ClassConstants,
    diameter: f64,
    window: usize,
    length: u64,
) -> Result<BoundReport> {
    let k5 = window_constants(constants, window)?;
    check_positive("diameter", diameter)?;
    let (a, b) = sliding_window_terms(constants.k3, k5, diameter, window as f64, length, 1);
    BoundReport::new(
        BoundName::SlidingWindowPerEpisode,
        a + b,
        vec![
            ("k3", constants.k3),
            ("k5", k5),
            ("diameter", diameter),
            ("window", window as f64),
            ("length", length as f64),
        ],
    )
}

/// Regret of the sliding-window rule over `T` steps and `Δ_T` episodes:
/// `K3·K5·T/√L + L·K3·K·Δ_T`.
pub fn bound_sliding_window(
    constants: &ClassConstants,
    diameter: f64,
    window: usize,
    horizon: u64,
    episodes: u64,
) -> Result<BoundReport> {
    let k5 = window_constants(constants, window)?;
    check_positive("diameter", diameter)?;
    if episodes == 0 {
        return Err(Error::param("delta_t", "must be at least 1"));
    }
    let (a, b) = sliding_window_terms(constants.k3, k5, diameter, window as f64, horizon, episodes);
    BoundReport::new(
        BoundName::SlidingWindowTotal,
        a + b,
        vec![
            ("k3", constants.k3),
            ("k5", k5),
            ("diameter", diameter),
            ("window", window as f64),
            ("horizon", horizon as f64),
            ("delta_t", episodes as f64),
        ],
    )
}

/// `K5^{2/3}·K^{1/3}·(Δ_T/T)^{1/3}·(2^{1/3} + 2^{−2/3})`.
pub fn normalized_regret_bound_kwl(
    k5: f64,
    diameter: f64,
    horizon: u64,
    episodes: u64,
) -> Result<BoundReport> {
    check_positive("k5", k5)?;
    check_positive("diameter", diameter)?;
    if horizon == 0 || episodes == 0 || episodes > horizon {
        return Err(Error::param(
            "delta_t",
            format!("need 1 <= delta_t <= T, got delta_t = {episodes}, T = {horizon}"),
        ));
    }
    let ratio = episodes as f64 / horizon as f64;
    let coef = 2f64.cbrt() + 2f64.powf(-2.0 / 3.0);
    let value = k5.powf(2.0 / 3.0) * diameter.cbrt() * ratio.cbrt() * coef;
    BoundReport::new(
        BoundName::NormalizedRegretKwl,
        value,
        vec![
            ("k5", k5),
            ("diameter", diameter),
            ("horizon", horizon as f64),
            ("delta_t", episodes as f64),
        ],
    )
}

/// Outcome of a Monte-Carlo check of
/// `E‖X_{s+1}−θ‖² ≤ γ·E‖X_s−θ‖² + H(β)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Lemma2Report {
    pub s: u64,
    pub distance_s: MonteCarloEstimate,
    pub distance_next: MonteCarloEstimate,
    pub gamma: f64,
    pub h: f64,
    /// Standard error of the per-replication difference
    /// `‖X_{s+1}−θ‖² − γ‖X_s−θ‖²`.
    pub combined_standard_error: f64,
    pub holds: bool,
}

impl Lemma2Report {
    pub fn lhs(&self) -> f64 {
        self.distance_next.mean
    }

    pub fn rhs(&self) -> f64 {
        self.gamma * self.distance_s.mean + self.h
    }

    pub fn to_bound_report(&self) -> Result<BoundReport> {
        BoundReport::new(
            BoundName::Lemma2Recursion,
            self.rhs(),
            vec![
                ("s", self.s as f64),
                ("gamma", self.gamma),
                ("h", self.h),
                ("distance_s", self.distance_s.mean),
                ("distance_next", self.distance_next.mean),
                ("combined_standard_error", self.combined_standard_error),
            ],
        )
    }
}

/// Monte-Carlo check of the one-step distance recursion for the fixed-step
/// rule on a stationary objective. `X_s` is the action played at step `s`.
///
/// Both sides are estimated from the same replications, so the tolerance uses
/// the standard error of the paired difference.
#[allow(clippy::too_many_arguments)]
pub fn lemma2_recursion_check(
    config: &FixedStepConfig,
    x0: &Point,
    f: &ObjectiveSpec,
    noise: &NoiseModel,
    s: u64,
    replications: u64,
    base_seed: u64,
) -> Result<Lemma2Report> {
    if s == 0 {
        return Err(Error::param("s_probe", "must be at least 1"));
    }
    let inputs = FixedStepInputs::for_objective(f, noise, config.beta(), config.c());
    let gamma = inputs.gamma()?;
    let h = inputs.h()?;
    let env = EnvironmentSchedule::stationary(s + 1, f.clone())?;
    let policy = Policy::FixedStep {
        config: *config,
        x0: x0.clone(),
    };
    let rows = distance_samples(&policy, &env, noise, &[s, s + 1], replications, base_seed)?;
    let now: Vec<f64> = rows.iter().map(|r| r[0]).collect();
    let next: Vec<f64> = rows.iter().map(|r| r[1]).collect();
    let diff: Vec<f64> = rows.iter().map(|r| r[1] - gamma * r[0]).collect();
    let distance_s = MonteCarloEstimate::from_samples(&now, base_seed);
    let distance_next = MonteCarloEstimate::from_samples(&next, base_seed);
    let d = MonteCarloEstimate::from_samples(&diff, base_seed);
    let holds = d.mean <= h + 3.0 * d.standard_error;
    Ok(Lemma2Report {
        s,
        distance_s,
        distance_next,
        gamma,
        h,
        combined_standard_error: d.standard_error,
        holds,
    })
}

/// Calibrated sliding-window constant and the per-probe values it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct K5Calibration {
    pub k5: f64,
    /// `(L, √L · mean distance)` for every probe window and objective.
    pub probes: Vec<(usize, f64)>,
}

/// Fits `K5` as the largest `√L · E‖X_s − θ‖²` over probe windows, where the
/// expectation is averaged over `s ∈ (L, 4(L+1)]` of a stationary run of the
/// restart window rule. Every objective in `objectives` is probed.
#[allow(clippy::too_many_arguments)]
pub fn calibrate_k5(
    objectives: &[ObjectiveSpec],
    noise: &NoiseModel,
    x0: &Point,
    c: f64,
    windows: &[usize],
    replications: u64,
    base_seed: u64,
) -> Result<K5Calibration> {
    if objectives.is_empty() || windows.is_empty() {
        return Err(Error::param(
            "k5",
            "calibration needs objectives and probe windows",
        ));
    }
    let mut probes = Vec::new();
    let mut k5 = 0.0f64;
    for f in objectives {
        for &window in windows {
            let cfg =
                SlidingWindowConfig::new(window, x0.clone(), c, WindowPolicy::Restart, f.domain())?;
            let horizon = 4 * (window as u64 + 1);
            let env = EnvironmentSchedule::stationary(horizon, f.clone())?;
            let est = mean_distance(
                &Policy::SlidingWindow(cfg),
                &env,
                noise,
                window as u64,
                horizon,
                replications,
                base_seed,
            )?;
            let v = (window as f64).sqrt() * est.mean;
            k5 = k5.max(v);
            probes.push((window, v));
        }
    }
    if k5 <= 0.0 {
        return Err(Error::param("k5", "calibration produced a zero constant"));
    }
    Ok(K5Calibration { k5, probes })
}

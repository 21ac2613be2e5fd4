use serde::{Deserialize, Serialize};

use crate::bandit::{
    ClassConstants, Domain, EnvironmentSchedule, NoiseKind, NoiseModel, ObjectiveKind,
    ObjectiveSpec, Point,
};
use crate::error::{Error, Result};
use crate::kw::{tuning, WindowPolicy};

/// Marker for the string `"auto"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AutoKeyword {
    Auto,
}

/// Marker for the string `"calibrate"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CalibrateKeyword {
    Calibrate,
}

/// A number, or `"auto"` for the closed-form optimum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Tunable<T> {
    Value(T),
    Auto(AutoKeyword),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum K5Spec {
    Value(f64),
    Calibrate(CalibrateKeyword),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainConfig {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Curvature {
    Scalar(f64),
    PerAxis(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ObjectiveConfig {
    Quadratic {
        #[serde(default)]
        offset: f64,
        curvature: Curvature,
        theta: Vec<f64>,
    },
    Quartic {
        #[serde(default)]
        offset: f64,
        b: f64,
        q: f64,
        theta: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ScheduleConfig {
    Stationary,
    Explicit {
        change_times: Vec<u64>,
    },
    /// `episodes` evenly spaced changes; objectives are cycled in order.
    EvenlySpaced {
        episodes: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseConfig {
    pub kind: NoiseKind,
    #[serde(default)]
    pub sigma2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VariantName {
    Vanilla,
    FixedStep,
    SlidingWindow,
    Oracle,
    Static,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgorithmConfig {
    pub variant: VariantName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<Tunable<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    /// Starting point (or the fixed action for `static`); defaults to the
    /// centre of the domain.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<Tunable<usize>>,
    #[serde(default)]
    pub window_policy: WindowPolicy,
    /// Number of episodes assumed by `"auto"` tuning.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_t: Option<u64>,
}

fn default_alpha() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantsConfig {
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    pub k4: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k5: Option<K5Spec>,
    #[serde(default)]
    pub s0: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CalibrationConfig {
    #[serde(default = "default_probe_windows")]
    pub windows: Vec<usize>,
    #[serde(default = "default_calibration_replications")]
    pub replications: u64,
}

fn default_probe_windows() -> Vec<usize> {
    vec![4, 16, 64, 256]
}

fn default_calibration_replications() -> u64 {
    100
}

impl Default for CalibrationConfig {
    fn default() -> Self {
        Self {
            windows: default_probe_windows(),
            replications: default_calibration_replications(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepAxis {
    #[serde(rename = "T")]
    Horizon,
    #[serde(rename = "delta_T")]
    DeltaT,
    #[serde(rename = "beta")]
    Beta,
    #[serde(rename = "L")]
    Window,
}

impl SweepAxis {
    pub fn label(self) -> &'static str {
        match self {
            SweepAxis::Horizon => "T",
            SweepAxis::DeltaT => "delta_T",
            SweepAxis::Beta => "beta",
            SweepAxis::Window => "L",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
}

/// A complete experiment description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub domain: DomainConfig,
    pub objectives: Vec<ObjectiveConfig>,
    pub schedule: ScheduleConfig,
    pub noise: NoiseConfig,
    pub algorithm: AlgorithmConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constants: Option<ConstantsConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub calibration: Option<CalibrationConfig>,
    pub horizon: u64,
    #[serde(default = "default_replications")]
    pub replications: u64,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default = "default_output")]
    pub output: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
}

fn default_replications() -> u64 {
    1
}

fn default_output() -> String {
    "out".to_string()
}

/// Parses and validates a JSON config document.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let cfg: ExperimentConfig =
        serde_json::from_str(text).map_err(|e| Error::Config(vec![e.to_string()]))?;
    cfg.validate()?;
    Ok(cfg)
}

impl ExperimentConfig {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialises")
    }

    /// Checks every field and reports all problems at once.
    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        let domain = match Domain::new(self.domain.lower.clone(), self.domain.upper.clone()) {
            Ok(d) => Some(d),
            Err(e) => {
                errs.push(format!("domain: {e}"));
                None
            }
        };
        if self.horizon == 0 {
            errs.push("horizon: must be at least 1".into());
        }
        if self.replications == 0 {
            errs.push("replications: must be at least 1".into());
        }
        if self.objectives.is_empty() {
            errs.push("objectives: at least one objective is required".into());
        }
        let mut objectives = Vec::new();
        if let Some(d) = &domain {
            for (i, o) in self.objectives.iter().enumerate() {
                match o.build(d) {
                    Ok(f) => objectives.push(f),
                    Err(e) => errs.push(format!("objectives[{i}].theta/parameters: {e}")),
                }
            }
        }
        if let Err(e) = self.noise() {
            errs.push(format!("noise: {e}"));
        }
        if let Some(k) = &self.constants {
            if let Err(e) = k.build_without_k5() {
                errs.push(format!("constants: {e}"));
            }
            if let Some(K5Spec::Value(v)) = k.k5 {
                if !(v.is_finite() && v > 0.0) {
                    errs.push(format!("constants.k5: must be positive, got {v}"));
                }
            }
        }
        if let Some(c) = &self.calibration {
            if c.windows.is_empty() || c.windows.contains(&0) {
                errs.push("calibration.windows: need at least one positive window".into());
            }
            if c.replications < 2 {
                errs.push("calibration.replications: must be at least 2".into());
            }
        }
        if objectives.len() == self.objectives.len() && !objectives.is_empty() && self.horizon > 0 {
            if let Err(e) = self.schedule_with(&objectives) {
                errs.push(format!("schedule: {e}"));
            }
        }
        if let Some(d) = &domain {
            self.validate_algorithm(d, &mut errs);
        }
        if let Some(s) = &self.sweep {
            validate_sweep(s, self, &mut errs);
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(errs))
        }
    }

    fn validate_algorithm(&self, domain: &Domain, errs: &mut Vec<String>) {
        let a = &self.algorithm;
        if let Some(x0) = &a.x0 {
            if let Err(e) = domain.check_contains(x0) {
                errs.push(format!("algorithm.x0: {e}"));
            }
        }
        if !(a.alpha > 0.0 && a.alpha <= 1.0) {
            errs.push(format!(
                "algorithm.alpha: must lie in (0, 1], got {}",
                a.alpha
            ));
        }
        if let Some(c) = a.c {
            if !(c.is_finite() && c > 0.0) {
                errs.push(format!("algorithm.c: must be positive, got {c}"));
            }
        }
        let needs_auto =
            matches!(a.beta, Some(Tunable::Auto(_))) || matches!(a.window, Some(Tunable::Auto(_)));
        if needs_auto {
            if self.constants.is_none() {
                errs.push("constants: required by \"auto\" tuning".into());
            }
            match a.delta_t {
                None => errs.push(
                    "algorithm.delta_t: required by \"auto\" tuning (β* and L* depend on Δ_T/T)"
                        .into(),
                ),
                Some(dt) if dt == 0 || dt > self.horizon => errs.push(format!(
                    "algorithm.delta_t: must lie in [1, horizon], got {dt}"
                )),
                _ => {}
            }
        }
        match a.variant {
            VariantName::FixedStep => match a.beta {
                None => errs.push("algorithm.beta: required for fixed_step".into()),
                Some(Tunable::Value(b)) if !(b.is_finite() && b > 0.0) => {
                    errs.push(format!("algorithm.beta: must be positive, got {b}"))
                }
                Some(Tunable::Auto(_))
                    if self.noise().map(|n| n.sigma2() == 0.0).unwrap_or(false) =>
                {
                    errs.push("algorithm.beta: \"auto\" needs positive noise variance".into())
                }
                _ => {
                    if a.c.is_none() && a.alpha >= 1.0 {
                        errs.push("algorithm.c: required for fixed_step when alpha = 1".into());
                    }
                }
            },
            VariantName::SlidingWindow => {
                match a.window {
                    None => errs.push("algorithm.window: required for sliding_window".into()),
                    Some(Tunable::Value(0)) => {
                        errs.push("algorithm.window: must be at least 1".into())
                    }
                    Some(Tunable::Auto(_)) => {
                        if let Some(k) = &self.constants {
                            if k.k5.is_none() {
                                errs.push("constants.k5: required by \"auto\" window".into());
                            }
                        }
                    }
                    _ => {}
                }
                if a.c.is_none() {
                    errs.push("algorithm.c: required for sliding_window".into());
                }
                if let (Some(Tunable::Value(l)), Some(k)) = (a.window, &self.constants) {
                    if k.s0 > 0 && (l as u64) <= k.s0 {
                        errs.push(format!(
                            "algorithm.window: must exceed constants.s0 = {}",
                            k.s0
                        ));
                    }
                }
            }
            VariantName::Vanilla | VariantName::Oracle | VariantName::Static => {}
        }
    }

    pub fn build_domain(&self) -> Result<Domain> {
        Domain::new(self.domain.lower.clone(), self.domain.upper.clone())
    }

    pub fn noise(&self) -> Result<NoiseModel> {
        NoiseModel::new(self.noise.kind, self.noise.sigma2)
    }

    pub fn build_objectives(&self, domain: &Domain) -> Result<Vec<ObjectiveSpec>> {
        self.objectives.iter().map(|o| o.build(domain)).collect()
    }

    fn schedule_with(&self, objectives: &[ObjectiveSpec]) -> Result<EnvironmentSchedule> {
        match &self.schedule {
            ScheduleConfig::Stationary => {
                if objectives.len() != 1 {
                    return Err(Error::Schedule(format!(
                        "stationary schedule takes exactly one objective, got {}",
                        objectives.len()
                    )));
                }
                EnvironmentSchedule::stationary(self.horizon, objectives[0].clone())
            }
            ScheduleConfig::Explicit { change_times } => {
                EnvironmentSchedule::new(self.horizon, change_times.clone(), objectives.to_vec())
            }
            ScheduleConfig::EvenlySpaced { episodes } => {
                EnvironmentSchedule::evenly_spaced(self.horizon, *episodes, objectives)
            }
        }
    }

    pub fn build_environment(&self) -> Result<EnvironmentSchedule> {
        let domain = self.build_domain()?;
        let objectives = self.build_objectives(&domain)?;
        self.schedule_with(&objectives)
    }

    /// Declared constants, or the envelope of the objectives' analytic ones.
    pub fn class_constants(&self, env: &EnvironmentSchedule) -> Result<ClassConstants> {
        match &self.constants {
            Some(k) => {
                let base = k.build_without_k5()?;
                match k.k5 {
                    Some(K5Spec::Value(v)) => base.with_k5(v),
                    _ => Ok(base),
                }
            }
            None => Ok(
                ClassConstants::envelope(env.objectives().iter().map(|f| *f.constants()))
                    .expect("schedules hold at least one objective"),
            ),
        }
    }

    pub fn wants_k5_calibration(&self) -> bool {
        matches!(
            self.constants.as_ref().and_then(|k| k.k5),
            Some(K5Spec::Calibrate(_))
        )
    }

    pub fn x0(&self, domain: &Domain) -> Point {
        match &self.algorithm.x0 {
            Some(x) => Point::from(x.clone()),
            None => domain
                .lower()
                .iter()
                .zip(domain.upper().iter())
                .map(|(l, u)| 0.5 * (l + u))
                .collect(),
        }
    }
}

impl ObjectiveConfig {
    pub fn build(&self, domain: &Domain) -> Result<ObjectiveSpec> {
        match self {
            ObjectiveConfig::Quadratic {
                offset,
                curvature,
                theta,
            } => {
                let curvature = match curvature {
                    Curvature::Scalar(b) => vec![*b; domain.dim()],
                    Curvature::PerAxis(v) => v.clone(),
                };
                ObjectiveSpec::new(
                    ObjectiveKind::QuadraticBowl {
                        offset: *offset,
                        curvature,
                    },
                    theta.clone(),
                    domain,
                )
            }
            ObjectiveConfig::Quartic {
                offset,
                b,
                q,
                theta,
            } => ObjectiveSpec::quartic(*offset, *b, *q, theta.clone(), domain),
        }
    }
}

impl ConstantsConfig {
    fn build_without_k5(&self) -> Result<ClassConstants> {
        Ok(ClassConstants::new(self.k1, self.k2, self.k3, self.k4)?.with_s0(self.s0))
    }
}

fn validate_sweep(s: &SweepConfig, cfg: &ExperimentConfig, errs: &mut Vec<String>) {
    if s.values.len() < 3 {
        errs.push(format!(
            "sweep.values: need at least 3 values, got {}",
            s.values.len()
        ));
    }
    if s.values.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
        errs.push("sweep.values: must be positive".into());
    }
    if s.values.windows(2).any(|w| w[0] >= w[1]) {
        errs.push("sweep.values: must be strictly increasing".into());
    }
    let integral = matches!(
        s.axis,
        SweepAxis::Horizon | SweepAxis::DeltaT | SweepAxis::Window
    );
    if integral && s.values.iter().any(|v| v.fract() != 0.0) {
        errs.push(format!(
            "sweep.values: axis {} takes integers",
            s.axis.label()
        ));
    }
    match s.axis {
        SweepAxis::DeltaT if !matches!(cfg.schedule, ScheduleConfig::EvenlySpaced { .. }) => {
            errs.push("sweep.axis: delta_T sweeps need an evenly_spaced schedule".into())
        }
        SweepAxis::Beta if cfg.algorithm.variant != VariantName::FixedStep => {
            errs.push("sweep.axis: beta sweeps need the fixed_step variant".into())
        }
        SweepAxis::Window if cfg.algorithm.variant != VariantName::SlidingWindow => {
            errs.push("sweep.axis: L sweeps need the sliding_window variant".into())
        }
        _ => {}
    }
}

/// Applies one sweep value to a copy of `base`.
pub fn with_axis_value(base: &ExperimentConfig, axis: SweepAxis, value: f64) -> ExperimentConfig {
    let mut cfg = base.clone();
    cfg.sweep = None;
    match axis {
        SweepAxis::Horizon => cfg.horizon = value as u64,
        SweepAxis::DeltaT => {
            cfg.schedule = ScheduleConfig::EvenlySpaced {
                episodes: value as u64,
            };
            if cfg.algorithm.delta_t.is_some() {
                cfg.algorithm.delta_t = Some(value as u64);
            }
        }
        SweepAxis::Beta => cfg.algorithm.beta = Some(Tunable::Value(value)),
        SweepAxis::Window => cfg.algorithm.window = Some(Tunable::Value(value as usize)),
    }
    cfg
}

/// Resolves `"auto"` step size: `β*` from the declared constants.
pub(crate) fn auto_beta(
    cfg: &ExperimentConfig,
    env: &EnvironmentSchedule,
    noise: &NoiseModel,
) -> Result<f64> {
    let dt = cfg
        .algorithm
        .delta_t
        .ok_or_else(|| Error::param("delta_t", "required by \"auto\" tuning"))?;
    let domain = env.objectives()[0].domain();
    tuning::beta_star(
        domain.diameter(),
        noise.sigma_tilde2(env.dim()),
        cfg.algorithm.alpha,
        cfg.horizon,
        dt,
    )
}

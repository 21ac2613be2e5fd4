use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::bandit::{ClassConstants, Domain, Point};
use crate::error::{Error, Result};
use crate::kw::estimator::GradientEstimate;
use crate::kw::tuning;

/// Fixed step-size KW: `X_{s+1} = Π(X_s + β·Y_s)` with constant `β` and `c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedStepConfig {
    beta: f64,
    c: f64,
    alpha: f64,
    gamma: f64,
}

impl FixedStepConfig {
    /// Validates `β, c > 0`, `α ∈ (0, 1]` and `γ(β, K1, K2) < 1`.
    pub fn new(beta: f64, c: f64, alpha: f64, constants: &ClassConstants) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::param("c", format!("must be positive, got {c}")));
        }
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::param(
                "alpha",
                format!("must lie in (0, 1], got {alpha}"),
            ));
        }
        let gamma = tuning::gamma(beta, constants.k1, constants.k2)?;
        Ok(Self {
            beta,
            c,
            alpha,
            gamma,
        })
    }

    /// `β = c^{2/(1−α)}`.
    pub fn coupled(c: f64, alpha: f64, constants: &ClassConstants) -> Result<Self> {
        Self::new(tuning::coupled_beta(c, alpha)?, c, alpha, constants)
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// γ evaluated against the constants supplied at construction.
    pub fn gamma(&self) -> f64 {
        self.gamma
    }
}

/// What happens when a new estimate arrives at a full window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WindowPolicy {
    /// Clear the window and restart the chain at `x0`; the incoming estimate
    /// (taken at the last iterate of the finished chain) is discarded.
    #[default]
    Restart,
    /// Ring buffer: drop the oldest estimate, keep the newest `L`.
    Slide,
}

/// Sliding-window KW: `X = Π(x0 + Σ_{n=1}^{m} n^{−1/2}·y_(n))` over the
/// window contents, oldest first.
#[derive(Debug, Clone, PartialEq)]
pub struct SlidingWindowConfig {
    window: usize,
    x0: Point,
    c: f64,
    policy: WindowPolicy,
}

impl SlidingWindowConfig {
    pub fn new(
        window: usize,
        x0: impl Into<Point>,
        c: f64,
        policy: WindowPolicy,
        domain: &Domain,
    ) -> Result<Self> {
        if window == 0 {
            return Err(Error::param("window", "must be at least 1"));
        }
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::param("c", format!("must be positive, got {c}")));
        }
        let x0 = x0.into();
        domain.check_contains(&x0)?;
        Ok(Self {
            window,
            x0,
            c,
            policy,
        })
    }

    /// Uses `c = L^{−1/4}`, the last perturbation of the vanilla schedule.
    pub fn with_default_perturbation(
        window: usize,
        x0: impl Into<Point>,
        policy: WindowPolicy,
        domain: &Domain,
    ) -> Result<Self> {
        Self::new(window, x0, (window as f64).powf(-0.25), policy, domain)
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn x0(&self) -> &Point {
        &self.x0
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn policy(&self) -> WindowPolicy {
        self.policy
    }
}

/// Weight of the `n`-th oldest estimate in the window (1-based): `n^{−1/2}`.
pub fn window_weight(n: usize) -> f64 {
    1.0 / (n as f64).sqrt()
}

/// Action implied by a window of estimates, ordered oldest to newest.
pub fn sliding_window_action<'a>(
    cfg: &SlidingWindowConfig,
    buffer: impl IntoIterator<Item = &'a GradientEstimate>,
    domain: &Domain,
) -> Point {
    let mut acc = cfg.x0.clone();
    for (i, est) in buffer.into_iter().enumerate() {
        acc.add_scaled(window_weight(i + 1), &est.y);
    }
    domain.project(&acc)
}

/// Allocation rules driven by [`crate::regret::run_trajectory`].
#[derive(Debug, Clone, PartialEq)]
pub enum Policy {
    /// Decaying schedule `β_s = s^{−1/2}`, `c_s = s^{−1/4}`.
    Vanilla {
        x0: Point,
    },
    FixedStep {
        config: FixedStepConfig,
        x0: Point,
    },
    SlidingWindow(SlidingWindowConfig),
    /// Plays the current maximizer; a harness self-test with zero regret.
    Oracle,
    /// Always plays the same action.
    Static {
        x: Point,
    },
}

impl Policy {
    pub fn name(&self) -> &'static str {
        match self {
            Policy::Vanilla { .. } => "vanilla",
            Policy::FixedStep { .. } => "fixed_step",
            Policy::SlidingWindow(_) => "sliding_window",
            Policy::Oracle => "oracle",
            Policy::Static { .. } => "static",
        }
    }

    /// Initial state, or `None` for policies that never learn.
    pub fn initial_state(&self, domain: &Domain) -> Result<Option<AlgorithmState>> {
        Ok(match self {
            Policy::Vanilla { x0 } => Some(AlgorithmState::vanilla(x0.clone(), domain)?),
            Policy::FixedStep { x0, .. } => Some(AlgorithmState::fixed_step(x0.clone(), domain)?),
            Policy::SlidingWindow(cfg) => Some(AlgorithmState::sliding_window(cfg, domain)?),
            Policy::Oracle => None,
            Policy::Static { x } => {
                domain.check_contains(x)?;
                None
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    Vanilla,
    FixedStep,
    SlidingWindow,
}

/// Mutable per-trajectory state of a KW rule.
#[derive(Debug, Clone)]
pub struct AlgorithmState {
    variant: Variant,
    current_x: Point,
    steps: u64,
    window: VecDeque<GradientEstimate>,
    /// Unprojected running sum `x0 + Σ n^{−1/2} y_(n)` for the restart policy.
    window_sum: Point,
}

impl AlgorithmState {
    fn with_variant(variant: Variant, x0: Point, domain: &Domain) -> Result<Self> {
        domain.check_contains(&x0)?;
        Ok(Self {
            variant,
            window_sum: x0.clone(),
            current_x: x0,
            steps: 0,
            window: VecDeque::new(),
        })
    }

    pub fn vanilla(x0: Point, domain: &Domain) -> Result<Self> {
        Self::with_variant(Variant::Vanilla, x0, domain)
    }

    pub fn fixed_step(x0: Point, domain: &Domain) -> Result<Self> {
        Self::with_variant(Variant::FixedStep, x0, domain)
    }

    pub fn sliding_window(cfg: &SlidingWindowConfig, domain: &Domain) -> Result<Self> {
        Self::with_variant(Variant::SlidingWindow, cfg.x0.clone(), domain)
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn current_x(&self) -> &Point {
        &self.current_x
    }

    /// Number of updates applied so far.
    pub fn steps(&self) -> u64 {
        self.steps
    }

    /// Window contents, oldest first (empty for non-window variants).
    pub fn window(&self) -> &VecDeque<GradientEstimate> {
        &self.window
    }

    /// Perturbation the next gradient estimate must use.
    pub fn vanilla_perturbation(&self) -> f64 {
        ((self.steps + 1) as f64).powf(-0.25)
    }

    fn expect(&self, variant: Variant) -> Result<()> {
        if self.variant == variant {
            Ok(())
        } else {
            Err(Error::param(
                "variant",
                format!("state is {:?}, update expects {variant:?}", self.variant),
            ))
        }
    }

    fn check_dim(&self, y: &GradientEstimate) -> Result<()> {
        if y.dim() == self.current_x.dim() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.current_x.dim(),
                actual: y.dim(),
            })
        }
    }

    /// `X_{s+1} = Π(X_s + s^{−1/2}·Y_s)` where `s` is the 1-based step.
    pub fn step_vanilla(&mut self, y: &GradientEstimate, domain: &Domain) -> Result<()> {
        self.expect(Variant::Vanilla)?;
        self.check_dim(y)?;
        let s = self.steps + 1;
        self.current_x.add_scaled(1.0 / (s as f64).sqrt(), &y.y);
        domain.project_in_place(&mut self.current_x);
        self.steps = s;
        Ok(())
    }

    /// `X_{s+1} = Π(X_s + β·Y_s)`.
    pub fn step_fixed(
        &mut self,
        y: &GradientEstimate,
        cfg: &FixedStepConfig,
        domain: &Domain,
    ) -> Result<()> {
        self.expect(Variant::FixedStep)?;
        self.check_dim(y)?;
        self.current_x.add_scaled(cfg.beta, &y.y);
        domain.project_in_place(&mut self.current_x);
        self.steps += 1;
        Ok(())
    }

    /// Feeds one estimate into the window and recomputes the action.
    pub fn sliding_window_advance(
        &mut self,
        estimate: GradientEstimate,
        cfg: &SlidingWindowConfig,
        domain: &Domain,
    ) -> Result<()> {
        self.expect(Variant::SlidingWindow)?;
        self.check_dim(&estimate)?;
        match cfg.policy {
            WindowPolicy::Slide => {
                self.window.push_back(estimate);
                if self.window.len() > cfg.window {
                    self.window.pop_front();
                }
                self.current_x = sliding_window_action(cfg, &self.window, domain);
            }
            WindowPolicy::Restart => {
                if self.window.len() == cfg.window {
                    self.window.clear();
                    self.window_sum = cfg.x0.clone();
                } else {
                    // Same accumulation order as `sliding_window_action`, so
                    // replaying the stored window reproduces the bits.
                    self.window_sum
                        .add_scaled(window_weight(self.window.len() + 1), &estimate.y);
                    self.window.push_back(estimate);
                }
                self.current_x = domain.project(&self.window_sum);
            }
        }
        self.steps += 1;
        Ok(())
    }
}

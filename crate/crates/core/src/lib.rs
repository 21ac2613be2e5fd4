//! Kiefer-Wolfowitz allocation rules for non-stationary continuum-armed bandits.
//!
//! The crate is split into four layers:
//!
//! * [`bandit`]: box domains, synthetic objective classes, reward noise,
//!   piecewise-stationary environment schedules and a grid verifier for the
//!   smoothness conditions the regret analysis relies on.
//! * [`kw`]: the finite-difference gradient estimator, the vanilla,
//!   fixed-step and sliding-window update rules, and the tuning calculators
//!   (γ, H(β), β*, L*).
//! * [`regret`]: trajectory execution, Monte-Carlo regret estimation,
//!   closed-form regret bounds and log-log exponent fitting.
//! * [`experiment`]: JSON configs, seeded parallel runs and sweeps, CSV output.

pub mod bandit;
pub mod error;
pub mod experiment;
pub mod kw;
pub mod regret;
pub mod rng;

pub use bandit::{
    ClassConstants, ConditionReport, Domain, EnvironmentSchedule, NoiseKind, NoiseModel,
    ObjectiveKind, ObjectiveSpec, Point,
};
pub use error::{Error, Result};
pub use kw::{
    AlgorithmState, FixedStepConfig, GradientEstimate, Policy, SlidingWindowConfig, WindowPolicy,
};
pub use regret::{MonteCarloEstimate, RegretTrace};
pub use rng::RandomStream;

//! Kiefer-Wolfowitz allocation rules and their tuning formulas.

mod estimator;
mod policy;
pub mod tuning;

pub use estimator::{estimate_gradient, GradientEstimate};
pub use policy::{
    sliding_window_action, window_weight, AlgorithmState, FixedStepConfig, Policy,
    SlidingWindowConfig, Variant, WindowPolicy,
};

//! Trajectory execution, Monte-Carlo regret and the closed-form bounds.

pub mod bounds;
mod fit;
mod monte_carlo;
mod simulate;

pub use bounds::{
    bound_fixed_step, bound_sliding_window, bound_sliding_window_episode, calibrate_k5,
    closed_form_distance_bound, lemma2_recursion_check, normalized_regret_bound_kwb,
    normalized_regret_bound_kwl, BoundName, BoundReport, FixedStepInputs, K5Calibration,
    Lemma2Report,
};
pub use fit::{fit_scaling_exponent, ExponentFit};
pub use monte_carlo::{
    distance_samples, mean_distance, monte_carlo_regret, neumaier_sum, replicate,
    MonteCarloEstimate,
};
pub use simulate::{run_trajectory, simulate, total_regret, RegretTrace, StepRecord};

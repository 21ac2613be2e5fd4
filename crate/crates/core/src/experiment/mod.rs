//! Config-driven experiments: JSON parsing, seeded parallel runs, sweeps and
//! CSV output.
//!
//! Output bytes depend only on the config document and the base seed, never on
//! the number of worker threads.

mod config;
mod params;
mod run;
mod sweep;

pub use config::{
    parse_config, with_axis_value, AlgorithmConfig, AutoKeyword, CalibrateKeyword,
    CalibrationConfig, ConstantsConfig, Curvature, DomainConfig, ExperimentConfig, K5Spec,
    NoiseConfig, ObjectiveConfig, ScheduleConfig, SweepAxis, SweepConfig, Tunable, VariantName,
};
pub use params::{evaluate_named_bound, parse_param, Params};
pub use run::{
    prepare, run_experiment, simulate_prepared, summary_csv, trace_csv, with_threads, PreparedRun,
    RunArtifacts, RunSummary, Tuning, SUMMARY_COLUMNS, SUMMARY_FILE, TRACE_FILE,
};
pub use sweep::{
    fit_csv, fit_scale, run_sweep, run_sweep_to_dir, run_sweep_with, SweepOutcome, SWEEP_FIT_FILE,
    SWEEP_SUMMARY_FILE,
};

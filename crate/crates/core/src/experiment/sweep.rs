use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::experiment::config::{with_axis_value, ExperimentConfig, SweepAxis};
use crate::experiment::run::{
    prepare, simulate_prepared, summary_csv, with_threads, write_file, RunSummary,
};
use crate::regret::{fit_scaling_exponent, ExponentFit};

pub const SWEEP_SUMMARY_FILE: &str = "sweep_summary.csv";
pub const SWEEP_FIT_FILE: &str = "sweep_fit.csv";

/// Result of a sweep: one summary per axis value and the log-log fit of
/// `R_T/T` against the axis scale.
#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
    pub rows: Vec<RunSummary>,
    pub fit: ExponentFit,
}

/// The fit abscissa for an axis value: `Δ_T/T` on the `delta_T` axis,
/// the value itself otherwise.
pub fn fit_scale(axis: SweepAxis, value: f64, row: &RunSummary) -> f64 {
    match axis {
        SweepAxis::DeltaT => value / row.horizon as f64,
        _ => value,
    }
}

/// Runs a sweep with the default simulator.
pub fn run_sweep(base: &ExperimentConfig) -> Result<SweepOutcome> {
    run_sweep_with(base, |cfg| {
        let run = prepare(cfg)?;
        Ok(simulate_prepared(&run, cfg.replications, cfg.base_seed, false)?.0)
    })
}

/// Runs a sweep with an injected per-point evaluator. Points run in parallel;
/// rows come back in axis order.
pub fn run_sweep_with<F>(base: &ExperimentConfig, evaluate: F) -> Result<SweepOutcome>
where
    F: Fn(&ExperimentConfig) -> Result<RunSummary> + Sync,
{
    base.validate()?;
    let spec = base
        .sweep
        .clone()
        .ok_or_else(|| Error::Config(vec!["sweep: missing from the config".into()]))?;
    let rows: Vec<RunSummary> = spec
        .values
        .par_iter()
        .map(|&v| evaluate(&with_axis_value(base, spec.axis, v)))
        .collect::<Result<_>>()?;
    let pairs: Vec<(f64, f64)> = spec
        .values
        .iter()
        .zip(&rows)
        .map(|(&v, r)| (fit_scale(spec.axis, v, r), r.regret_per_step()))
        .collect();
    let fit = fit_scaling_exponent(&pairs)?;
    Ok(SweepOutcome {
        axis: spec.axis,
        values: spec.values,
        rows,
        fit,
    })
}

/// Columns: `axis, points, slope, intercept, r2`.
pub fn fit_csv(outcome: &SweepOutcome) -> Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(["axis", "points", "slope", "intercept", "r2"])?;
    w.write_record([
        outcome.axis.label().to_string(),
        outcome.fit.points.to_string(),
        format!("{}", outcome.fit.slope),
        format!("{}", outcome.fit.intercept),
        format!("{}", outcome.fit.r2),
    ])?;
    w.into_inner().map_err(|e| Error::Io(e.into_error()))
}

/// Runs the sweep on `threads` workers and writes the summary and fit CSVs.
pub fn run_sweep_to_dir(
    base: &ExperimentConfig,
    out_dir: &Path,
    threads: usize,
) -> Result<(SweepOutcome, PathBuf, PathBuf)> {
    let outcome = with_threads(threads, || run_sweep(base))?;
    fs::create_dir_all(out_dir)?;
    let summary_path = out_dir.join(SWEEP_SUMMARY_FILE);
    let fit_path = out_dir.join(SWEEP_FIT_FILE);
    write_file(
        &summary_path,
        &summary_csv(Some((outcome.axis.label(), &outcome.values)), &outcome.rows)?,
    )?;
    write_file(&fit_path, &fit_csv(&outcome)?)?;
    Ok((outcome, summary_path, fit_path))
}

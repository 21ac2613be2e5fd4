use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::bandit::{ClassConstants, EnvironmentSchedule, NoiseModel};
use crate::error::{Error, Result};
use crate::experiment::config::{auto_beta, ExperimentConfig, Tunable, VariantName};
use crate::kw::{tuning, FixedStepConfig, Policy, SlidingWindowConfig};
use crate::regret::{
    bound_fixed_step, bound_sliding_window, calibrate_k5, replicate, run_trajectory, total_regret,
    BoundReport, FixedStepInputs, MonteCarloEstimate, RegretTrace,
};
use crate::rng::RandomStream;

/// Label mixed into the base seed for the K5 calibration streams.
const K5_STREAM_LABEL: u64 = 0x6b35;

/// Tuning values actually used by a run.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Tuning {
    pub beta: Option<f64>,
    pub c: Option<f64>,
    pub window: Option<usize>,
    pub gamma: Option<f64>,
    pub h: Option<f64>,
    pub k5: Option<f64>,
}

/// A config resolved into simulator objects.
#[derive(Debug, Clone)]
pub struct PreparedRun {
    pub policy: Policy,
    pub env: EnvironmentSchedule,
    pub noise: NoiseModel,
    pub constants: ClassConstants,
    pub tuning: Tuning,
}

/// Builds the environment and policy, resolving `"auto"` values and, when
/// requested, calibrating K5.
pub fn prepare(cfg: &ExperimentConfig) -> Result<PreparedRun> {
    cfg.validate()?;
    let env = cfg.build_environment()?;
    let noise = cfg.noise()?;
    let domain = env.objectives()[0].domain().clone();
    let mut constants = cfg.class_constants(&env)?;
    let x0 = cfg.x0(&domain);
    let a = &cfg.algorithm;
    let mut tuning = Tuning {
        k5: constants.k5,
        ..Tuning::default()
    };

    if cfg.wants_k5_calibration() {
        let c =
            a.c.ok_or_else(|| Error::param("c", "K5 calibration needs algorithm.c"))?;
        let cal = cfg.calibration.clone().unwrap_or_default();
        let fit = calibrate_k5(
            env.objectives(),
            &noise,
            &x0,
            c,
            &cal.windows,
            cal.replications,
            RandomStream::child_seed(cfg.base_seed, K5_STREAM_LABEL),
        )?;
        constants = constants.with_k5(fit.k5)?;
        tuning.k5 = Some(fit.k5);
    }

    let policy = match a.variant {
        VariantName::Vanilla => Policy::Vanilla { x0 },
        VariantName::Oracle => Policy::Oracle,
        VariantName::Static => Policy::Static { x: x0 },
        VariantName::FixedStep => {
            let beta = match a.beta {
                Some(Tunable::Value(b)) => b,
                Some(Tunable::Auto(_)) => auto_beta(cfg, &env, &noise)?,
                None => return Err(Error::param("beta", "required for fixed_step")),
            };
            let c = match a.c {
                Some(c) => c,
                None => tuning::coupled_c(beta, a.alpha)?,
            };
            let config = FixedStepConfig::new(beta, c, a.alpha, &constants)?;
            let inputs = FixedStepInputs {
                constants,
                ..FixedStepInputs::for_environment(&env, &noise, beta, c)
            };
            tuning.beta = Some(beta);
            tuning.c = Some(c);
            tuning.gamma = Some(config.gamma());
            tuning.h = Some(inputs.h()?);
            Policy::FixedStep { config, x0 }
        }
        VariantName::SlidingWindow => {
            let c =
                a.c.ok_or_else(|| Error::param("c", "required for sliding_window"))?;
            let window = match a.window {
                Some(Tunable::Value(l)) => l,
                Some(Tunable::Auto(_)) => {
                    let dt = a
                        .delta_t
                        .ok_or_else(|| Error::param("delta_t", "required by \"auto\" tuning"))?;
                    tuning::l_star(constants.require_k5()?, domain.diameter(), cfg.horizon, dt)?
                }
                None => return Err(Error::param("window", "required for sliding_window")),
            };
            tuning.c = Some(c);
            tuning.window = Some(window);
            Policy::SlidingWindow(SlidingWindowConfig::new(
                window,
                x0,
                c,
                a.window_policy,
                &domain,
            )?)
        }
    };

    Ok(PreparedRun {
        policy,
        env,
        noise,
        constants,
        tuning,
    })
}

impl PreparedRun {
    /// The regret bound matching the variant, when its constants are known.
    pub fn bound(&self) -> Result<Option<BoundReport>> {
        let diameter = self.env.objectives()[0].domain().diameter();
        match &self.policy {
            Policy::FixedStep { config, .. } => {
                let inputs = FixedStepInputs {
                    constants: self.constants,
                    ..FixedStepInputs::for_environment(
                        &self.env,
                        &self.noise,
                        config.beta(),
                        config.c(),
                    )
                };
                Ok(Some(bound_fixed_step(
                    &inputs,
                    self.env.horizon(),
                    self.env.episodes(),
                )?))
            }
            Policy::SlidingWindow(cfg) if self.constants.k5.is_some() => {
                Ok(Some(bound_sliding_window(
                    &self.constants,
                    diameter,
                    cfg.window(),
                    self.env.horizon(),
                    self.env.episodes(),
                )?))
            }
            _ => Ok(None),
        }
    }
}

/// One summary row.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub variant: &'static str,
    pub horizon: u64,
    pub delta_t: u64,
    pub estimate: MonteCarloEstimate,
    pub bound: Option<BoundReport>,
    pub tuning: Tuning,
}

impl RunSummary {
    pub fn regret_per_step(&self) -> f64 {
        self.estimate.mean / self.horizon as f64
    }
}

/// Runs every replication of a prepared config. Replication `r` uses stream
/// `(base_seed, r)`; the trace of replication 0 is kept when asked for.
pub fn simulate_prepared(
    run: &PreparedRun,
    replications: u64,
    base_seed: u64,
    keep_trace: bool,
) -> Result<(RunSummary, Option<RegretTrace>)> {
    let trace = if keep_trace {
        let mut rng = RandomStream::new(base_seed, 0);
        Some(run_trajectory(&run.policy, &run.env, &run.noise, &mut rng)?)
    } else {
        None
    };
    let totals = replicate(replications, base_seed, |r, rng| match (&trace, r) {
        (Some(t), 0) => Ok(t.total()),
        _ => total_regret(&run.policy, &run.env, &run.noise, rng),
    })?;
    let summary = RunSummary {
        variant: run.policy.name(),
        horizon: run.env.horizon(),
        delta_t: run.env.episodes(),
        estimate: MonteCarloEstimate::from_samples(&totals, base_seed),
        bound: run.bound()?,
        tuning: run.tuning,
    };
    Ok((summary, trace))
}

/// Files written by [`run_experiment`].
#[derive(Debug, Clone)]
pub struct RunArtifacts {
    pub trace_path: PathBuf,
    pub summary_path: PathBuf,
    pub summary: RunSummary,
}

pub const TRACE_FILE: &str = "trace.csv";
pub const SUMMARY_FILE: &str = "summary.csv";

/// Executes `cfg` on a pool of `threads` workers (0 = one per core) and writes
/// `trace.csv` and `summary.csv` into `out_dir`.
pub fn run_experiment(
    cfg: &ExperimentConfig,
    out_dir: &Path,
    threads: usize,
) -> Result<RunArtifacts> {
    let (summary, trace) = with_threads(threads, || {
        let run = prepare(cfg)?;
        simulate_prepared(&run, cfg.replications, cfg.base_seed, true)
    })?;
    let trace = trace.expect("trace requested");
    fs::create_dir_all(out_dir)?;
    let trace_path = out_dir.join(TRACE_FILE);
    let summary_path = out_dir.join(SUMMARY_FILE);
    write_file(&trace_path, &trace_csv(&trace)?)?;
    write_file(
        &summary_path,
        &summary_csv(None, std::slice::from_ref(&summary))?,
    )?;
    Ok(RunArtifacts {
        trace_path,
        summary_path,
        summary,
    })
}

/// Runs `job` on a dedicated pool of `threads` workers (0 = one per core).
pub fn with_threads<T: Send>(threads: usize, job: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::param("threads", e.to_string()))?;
    pool.install(job)
}

pub(crate) fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut f = fs::File::create(path)?;
    f.write_all(bytes)?;
    f.flush()?;
    Ok(())
}

fn num(v: f64) -> String {
    format!("{v}")
}

fn opt<T: std::fmt::Display>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new())
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<Vec<u8>> {
    w.into_inner().map_err(|e| Error::Io(e.into_error()))
}

/// Trace columns: `step, episode, x_1..x_d, inst_regret, cum_regret,
/// boundary_contact`. Episodes are numbered from 1.
pub fn trace_csv(trace: &RegretTrace) -> Result<Vec<u8>> {
    let mut w = writer();
    let dim = trace.records.first().map_or(0, |r| r.action.dim());
    let mut header = vec!["step".to_string(), "episode".to_string()];
    header.extend((1..=dim).map(|i| format!("x_{i}")));
    header.extend(["inst_regret", "cum_regret", "boundary_contact"].map(String::from));
    w.write_record(&header)?;
    let mut row = Vec::with_capacity(header.len());
    for r in &trace.records {
        row.clear();
        row.push(r.step.to_string());
        row.push((r.episode + 1).to_string());
        row.extend(r.action.iter().map(|v| num(*v)));
        row.push(num(r.inst_regret));
        row.push(num(r.cum_regret));
        row.push(u8::from(r.boundary_contact).to_string());
        w.write_record(&row)?;
    }
    finish(w)
}

pub const SUMMARY_COLUMNS: [&str; 16] = [
    "variant",
    "horizon",
    "delta_t",
    "replications",
    "base_seed",
    "mean_regret",
    "standard_error",
    "regret_per_step",
    "bound_name",
    "bound",
    "beta",
    "c",
    "window",
    "gamma",
    "h",
    "k5",
];

/// Summary rows; with `axis` set, a leading column carries the sweep value.
pub fn summary_csv(axis: Option<(&str, &[f64])>, rows: &[RunSummary]) -> Result<Vec<u8>> {
    let mut w = writer();
    let mut header: Vec<&str> = Vec::new();
    if let Some((name, _)) = axis {
        header.push(name);
    }
    header.extend(SUMMARY_COLUMNS);
    w.write_record(&header)?;
    for (i, s) in rows.iter().enumerate() {
        let mut row = Vec::with_capacity(header.len());
        if let Some((_, values)) = axis {
            row.push(num(values[i]));
        }
        row.extend([
            s.variant.to_string(),
            s.horizon.to_string(),
            s.delta_t.to_string(),
            s.estimate.replications.to_string(),
            s.estimate.base_seed.to_string(),
            num(s.estimate.mean),
            num(s.estimate.standard_error),
            num(s.regret_per_step()),
            opt(s.bound.as_ref().map(|b| b.name.label())),
            opt(s.bound.as_ref().map(|b| num(b.value))),
            opt(s.tuning.beta.map(num)),
            opt(s.tuning.c.map(num)),
            opt(s.tuning.window),
            opt(s.tuning.gamma.map(num)),
            opt(s.tuning.h.map(num)),
            opt(s.tuning.k5.map(num)),
        ]);
        w.write_record(&row)?;
    }
    finish(w)
}

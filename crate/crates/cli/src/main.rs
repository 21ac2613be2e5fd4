//! `kwbandit`: run, sweep and check Kiefer-Wolfowitz bandit experiments.
//!
//! Exit codes: 0 success, 1 validation error, 2 runtime or I/O error,
//! 3 failed check (`verify` or `bounds --check`).

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use kw_bandit::bandit::verify_conditions;
use kw_bandit::experiment::{
    evaluate_named_bound, parse_config, parse_param, prepare, run_experiment, run_sweep_to_dir,
    simulate_prepared, with_threads, ExperimentConfig, Params,
};
use kw_bandit::regret::{BoundName, BoundReport};
use kw_bandit::Error;

#[derive(Parser)]
#[command(
    name = "kwbandit",
    version,
    about = "Kiefer-Wolfowitz continuum bandit experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the declared class constants on a grid over the domain.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Grid points per axis.
        #[arg(long, default_value_t = 16)]
        grid: usize,
    },
    /// Run one experiment and write trace.csv and summary.csv.
    Run(Common),
    /// Run the config's sweep and write sweep_summary.csv and sweep_fit.csv.
    Sweep(Common),
    /// Evaluate bounds from a config or from named parameters.
    Bounds {
        #[command(flatten)]
        common: Common,
        /// Bound to evaluate from `--param` values, e.g. sliding-window-total.
        #[arg(long)]
        name: Option<String>,
        /// Parameter as key=value; repeatable.
        #[arg(long = "param", value_name = "KEY=VALUE")]
        params: Vec<String>,
        /// Simulate the config and fail unless mean − 3·SE stays below the bound.
        #[arg(long)]
        check: bool,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Overrides the config's base seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the config's replication count.
    #[arg(long)]
    replications: Option<u64>,
    /// Overrides the config's output directory.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

enum Failure {
    Validation(String),
    Runtime(String),
    Check(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(_) | Error::Csv(_) => Failure::Runtime(e.to_string()),
            _ => Failure::Validation(e.to_string()),
        }
    }
}

impl Common {
    fn load(&self) -> Result<ExperimentConfig, Failure> {
        let path = self
            .config
            .as_ref()
            .ok_or_else(|| Failure::Validation("--config is required".into()))?;
        let text = fs::read_to_string(path)
            .map_err(|e| Failure::Runtime(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = parse_config(&text)?;
        if let Some(seed) = self.seed {
            cfg.base_seed = seed;
        }
        if let Some(r) = self.replications {
            cfg.replications = r;
        }
        if let Some(out) = &self.out {
            cfg.output = out.to_string_lossy().into_owned();
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn print_bound(r: &BoundReport) {
    let inputs: Vec<String> = r.inputs.iter().map(|(k, v)| format!("{k}={v}")).collect();
    println!("{},{},{}", r.name, r.value, inputs.join(" "));
}

fn verify(common: &Common, grid: usize) -> Result<(), Failure> {
    let cfg = common.load()?;
    let env = cfg.build_environment()?;
    let declared = cfg.class_constants(&env)?;
    let mut ok = true;
    println!("objective,condition,declared,tightest,violations,holds");
    let domain = cfg.build_domain()?;
    for (i, f) in cfg.build_objectives(&domain)?.iter().enumerate() {
        let report = verify_conditions(f, &declared, f.domain(), grid)?;
        for c in &report.checks {
            println!(
                "{i},{},{},{},{},{}",
                c.condition.label(),
                c.declared,
                c.tightest,
                c.violations,
                c.holds()
            );
        }
        ok &= report.all_hold();
    }
    if ok {
        Ok(())
    } else {
        Err(Failure::Check(
            "declared constants violate a condition".into(),
        ))
    }
}

fn run(common: &Common) -> Result<(), Failure> {
    let cfg = common.load()?;
    let art = run_experiment(&cfg, Path::new(&cfg.output), common.threads)?;
    let s = &art.summary;
    println!(
        "mean_regret={} standard_error={} replications={}",
        s.estimate.mean, s.estimate.standard_error, s.estimate.replications
    );
    if let Some(b) = &s.bound {
        println!("bound {}={}", b.name, b.value);
    }
    println!(
        "wrote {} and {}",
        art.trace_path.display(),
        art.summary_path.display()
    );
    Ok(())
}

fn sweep(common: &Common) -> Result<(), Failure> {
    let cfg = common.load()?;
    let (out, summary, fit) = run_sweep_to_dir(&cfg, Path::new(&cfg.output), common.threads)?;
    println!(
        "axis={} slope={} r2={}",
        out.axis.label(),
        out.fit.slope,
        out.fit.r2
    );
    println!("wrote {} and {}", summary.display(), fit.display());
    Ok(())
}

fn bounds(common: &Common, name: Option<&str>, raw: &[String], check: bool) -> Result<(), Failure> {
    if let Some(name) = name {
        let bound = BoundName::from_label(name).ok_or_else(|| {
            let known: Vec<&str> = BoundName::ALL.iter().map(|b| b.label()).collect();
            Failure::Validation(format!(
                "unknown bound `{name}`; expected one of {}",
                known.join(", ")
            ))
        })?;
        let params: Params = raw
            .iter()
            .map(|p| parse_param(p))
            .collect::<Result<_, _>>()?;
        print_bound(&evaluate_named_bound(bound, &params)?);
        return Ok(());
    }
    let cfg = common.load()?;
    let prepared = with_threads(common.threads, || prepare(&cfg))?;
    let bound = prepared.bound()?.ok_or_else(|| {
        Failure::Validation(format!(
            "no regret bound applies to variant {} with the given constants",
            prepared.policy.name()
        ))
    })?;
    print_bound(&bound);
    if check {
        let (summary, _) = with_threads(common.threads, || {
            simulate_prepared(&prepared, cfg.replications, cfg.base_seed, false)
        })?;
        let lower = summary.estimate.mean - 3.0 * summary.estimate.standard_error;
        println!(
            "mean_regret={} standard_error={}",
            summary.estimate.mean, summary.estimate.standard_error
        );
        if lower > bound.value {
            return Err(Failure::Check(format!(
                "mean − 3·SE = {lower} exceeds {} = {}",
                bound.name, bound.value
            )));
        }
        println!("check passed");
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Verify { common, grid } => verify(common, *grid),
        Command::Run(c) => run(c),
        Command::Sweep(c) => sweep(c),
        Command::Bounds {
            common,
            name,
            params,
            check,
        } => bounds(common, name.as_deref(), params, *check),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Check(m)) => {
            eprintln!("check failed: {m}");
            ExitCode::from(3)
        }
    }
}

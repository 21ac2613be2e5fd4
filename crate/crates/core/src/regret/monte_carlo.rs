use rayon::prelude::*;

use crate::bandit::{EnvironmentSchedule, NoiseModel};
use crate::error::{Error, Result};
use crate::kw::Policy;
use crate::regret::simulate::{simulate, total_regret};
use crate::rng::RandomStream;

/// Mean and standard error over independent replications.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloEstimate {
    pub mean: f64,
    pub standard_error: f64,
    pub replications: u64,
    pub base_seed: u64,
}

impl MonteCarloEstimate {
    /// Summarises per-replication values given in replication order.
    ///
    /// Sums are compensated and taken in replication order, so the result
    /// does not depend on how the replications were scheduled.
    pub fn from_samples(values: &[f64], base_seed: u64) -> Self {
        let n = values.len();
        let mean = neumaier_sum(values.iter().copied()) / n as f64;
        let standard_error = if n > 1 {
            let ss = neumaier_sum(values.iter().map(|v| (v - mean) * (v - mean)));
            (ss / (n - 1) as f64).sqrt() / (n as f64).sqrt()
        } else {
            0.0
        };
        Self {
            mean,
            standard_error,
            replications: n as u64,
            base_seed,
        }
    }
}

/// Kahan–Babuška–Neumaier summation.
pub fn neumaier_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

fn check_replications(replications: u64) -> Result<()> {
    if replications < 2 {
        return Err(Error::param(
            "replications",
            format!("need at least 2, got {replications}"),
        ));
    }
    Ok(())
}

/// Runs `job` once per replication with stream `(base_seed, r)`; results are
/// returned in replication order regardless of the thread count.
pub fn replicate<T, F>(replications: u64, base_seed: u64, job: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64, &mut RandomStream) -> Result<T> + Sync,
{
    (0..replications)
        .into_par_iter()
        .map(|r| {
            let mut rng = RandomStream::new(base_seed, r);
            job(r, &mut rng)
        })
        .collect()
}

/// Monte-Carlo estimate of the expected cumulative regret `E[R_T]`.
pub fn monte_carlo_regret(
    policy: &Policy,
    env: &EnvironmentSchedule,
    noise: &NoiseModel,
    replications: u64,
    base_seed: u64,
) -> Result<MonteCarloEstimate> {
    check_replications(replications)?;
    let totals = replicate(replications, base_seed, |_, rng| {
        total_regret(policy, env, noise, rng)
    })?;
    Ok(MonteCarloEstimate::from_samples(&totals, base_seed))
}

/// Per-replication squared distances `‖X_s − θ_s‖²` at each probe step.
///
/// Row `r` holds replication `r`; column `j` corresponds to `probes[j]`.
pub fn distance_samples(
    policy: &Policy,
    env: &EnvironmentSchedule,
    noise: &NoiseModel,
    probes: &[u64],
    replications: u64,
    base_seed: u64,
) -> Result<Vec<Vec<f64>>> {
    check_replications(replications)?;
    let last = probes.iter().copied().max().unwrap_or(0);
    if last == 0 || last > env.horizon() {
        return Err(Error::param(
            "probes",
            format!("probe steps must lie in [1, {}]", env.horizon()),
        ));
    }
    replicate(replications, base_seed, |_, rng| {
        let mut row = vec![0.0; probes.len()];
        simulate(policy, env, noise, rng, last, |rec| {
            for (slot, &p) in row.iter_mut().zip(probes) {
                if p == rec.step {
                    *slot = rec.distance2;
                }
            }
        })?;
        Ok(row)
    })
}

/// Monte-Carlo estimate of the time-averaged squared distance
/// `(1/(to − from)) Σ_{s ∈ (from, to]} ‖X_s − θ_s‖²`.
pub fn mean_distance(
    policy: &Policy,
    env: &EnvironmentSchedule,
    noise: &NoiseModel,
    from: u64,
    to: u64,
    replications: u64,
    base_seed: u64,
) -> Result<MonteCarloEstimate> {
    check_replications(replications)?;
    if from >= to || to > env.horizon() {
        return Err(Error::param(
            "probes",
            format!("need from < to <= {}, got ({from}, {to}]", env.horizon()),
        ));
    }
    let averages = replicate(replications, base_seed, |_, rng| {
        let mut acc = 0.0;
        simulate(policy, env, noise, rng, to, |rec| {
            if rec.step > from {
                acc += rec.distance2;
            }
        })?;
        Ok(acc / (to - from) as f64)
    })?;
    Ok(MonteCarloEstimate::from_samples(&averages, base_seed))
}

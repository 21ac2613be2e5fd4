use crate::bandit::objective::ObjectiveSpec;
use crate::error::{Error, Result};

/// Piecewise-stationary sequence of objectives over steps `1..=T`.
///
/// Episode `i` starts at `change_times[i]` (the change takes effect AT that
/// step) and runs until the step before the next change time, or to `T`.
#[derive(Debug, Clone)]
pub struct EnvironmentSchedule {
    horizon: u64,
    change_times: Vec<u64>,
    objectives: Vec<ObjectiveSpec>,
}

impl EnvironmentSchedule {
    pub fn new(
        horizon: u64,
        change_times: Vec<u64>,
        objectives: Vec<ObjectiveSpec>,
    ) -> Result<Self> {
        if horizon == 0 {
            return Err(Error::Schedule("horizon must be at least 1".into()));
        }
        if change_times.is_empty() {
            return Err(Error::Schedule("at least one episode is required".into()));
        }
        if change_times[0] != 1 {
            return Err(Error::Schedule(format!(
                "the first episode must start at step 1, got {}",
                change_times[0]
            )));
        }
        if let Some(w) = change_times.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::Schedule(format!(
                "change times must be strictly increasing ({} then {})",
                w[0], w[1]
            )));
        }
        if let Some(&last) = change_times.last() {
            if last > horizon {
                return Err(Error::Schedule(format!(
                    "change time {last} exceeds horizon {horizon}"
                )));
            }
        }
        if objectives.len() != change_times.len() {
            return Err(Error::Schedule(format!(
                "{} change times but {} objectives",
                change_times.len(),
                objectives.len()
            )));
        }
        let dim = objectives[0].dim();
        if let Some(f) = objectives.iter().find(|f| f.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: f.dim(),
            });
        }
        if let Some(i) = objectives.windows(2).position(|w| w[0] == w[1]) {
            return Err(Error::Schedule(format!(
                "episodes {} and {} serve the same objective; a change must be a real change",
                i + 1,
                i + 2
            )));
        }
        Ok(Self {
            horizon,
            change_times,
            objectives,
        })
    }

    pub fn stationary(horizon: u64, objective: ObjectiveSpec) -> Result<Self> {
        Self::new(horizon, vec![1], vec![objective])
    }

    /// `episodes` equally long episodes (up to rounding), cycling through
    /// `cycle` for the served objectives.
    pub fn evenly_spaced(horizon: u64, episodes: u64, cycle: &[ObjectiveSpec]) -> Result<Self> {
        if episodes == 0 || episodes > horizon {
            return Err(Error::Schedule(format!(
                "episode count must lie in [1, {horizon}], got {episodes}"
            )));
        }
        if cycle.is_empty() {
            return Err(Error::Schedule("no objectives to cycle through".into()));
        }
        let change_times = (0..episodes)
            .map(|i| 1 + (i as u128 * horizon as u128 / episodes as u128) as u64)
            .collect();
        let objectives = (0..episodes as usize)
            .map(|i| cycle[i % cycle.len()].clone())
            .collect();
        Self::new(horizon, change_times, objectives)
    }

    pub fn horizon(&self) -> u64 {
        self.horizon
    }

    pub fn dim(&self) -> usize {
        self.objectives[0].dim()
    }

    /// Δ_T, the number of episodes up to the horizon.
    pub fn episodes(&self) -> u64 {
        self.change_times.len() as u64
    }

    pub fn change_times(&self) -> &[u64] {
        &self.change_times
    }

    pub fn objectives(&self) -> &[ObjectiveSpec] {
        &self.objectives
    }

    /// Episode lengths `T_i = τ_{i+1} − τ_i`, the last one running to `T`.
    pub fn episode_lengths(&self) -> Vec<u64> {
        self.change_times
            .iter()
            .enumerate()
            .map(|(i, &start)| {
                let end = self
                    .change_times
                    .get(i + 1)
                    .copied()
                    .unwrap_or(self.horizon + 1);
                end - start
            })
            .collect()
    }

    /// Zero-based episode index of step `s`.
    pub fn episode_of(&self, s: u64) -> Result<usize> {
        if s == 0 || s > self.horizon {
            return Err(Error::StepOutOfRange {
                step: s,
                horizon: self.horizon,
            });
        }
        Ok(self.change_times.partition_point(|&t| t <= s) - 1)
    }

    pub fn objective_at(&self, s: u64) -> Result<&ObjectiveSpec> {
        Ok(&self.objectives[self.episode_of(s)?])
    }
}

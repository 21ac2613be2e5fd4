use serde::{Deserialize, Serialize};

use crate::bandit::objective::ObjectiveSpec;
use crate::error::{Error, Result};
use crate::rng::RandomStream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseKind {
    #[serde(alias = "normal")]
    Gaussian,
    /// Uniform on `[−√(3σ²), √(3σ²)]`, variance exactly σ².
    #[serde(alias = "uniform")]
    UniformBounded,
    None,
}

/// Additive zero-mean reward noise with variance at most `sigma2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    kind: NoiseKind,
    sigma2: f64,
}

impl NoiseModel {
    pub fn new(kind: NoiseKind, sigma2: f64) -> Result<Self> {
        if !(sigma2.is_finite() && sigma2 >= 0.0) {
            return Err(Error::param(
                "sigma2",
                format!("must be finite and >= 0, got {sigma2}"),
            ));
        }
        if kind == NoiseKind::None && sigma2 != 0.0 {
            return Err(Error::param(
                "sigma2",
                "noise kind `none` requires sigma2 = 0",
            ));
        }
        Ok(Self { kind, sigma2 })
    }

    pub fn none() -> Self {
        Self {
            kind: NoiseKind::None,
            sigma2: 0.0,
        }
    }

    pub fn gaussian(sigma2: f64) -> Result<Self> {
        Self::new(NoiseKind::Gaussian, sigma2)
    }

    pub fn uniform(sigma2: f64) -> Result<Self> {
        Self::new(NoiseKind::UniformBounded, sigma2)
    }

    pub fn kind(&self) -> NoiseKind {
        self.kind
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    /// σ̃² = 4dσ², the variance bound of the d-dimensional difference vector.
    pub fn sigma_tilde2(&self, dim: usize) -> f64 {
        4.0 * dim as f64 * self.sigma2
    }

    /// Half-width of the support for bounded noise.
    pub fn support_half_width(&self) -> Option<f64> {
        match self.kind {
            NoiseKind::UniformBounded => Some((3.0 * self.sigma2).sqrt()),
            NoiseKind::None => Some(0.0),
            NoiseKind::Gaussian => None,
        }
    }

    /// One noise draw. Gaussian uses two RNG words, uniform one, none zero.
    pub fn draw(&self, rng: &mut RandomStream) -> f64 {
        match self.kind {
            NoiseKind::None => 0.0,
            NoiseKind::Gaussian => self.sigma2.sqrt() * rng.standard_normal(),
            NoiseKind::UniformBounded => {
                let half = (3.0 * self.sigma2).sqrt();
                half * (2.0 * rng.uniform() - 1.0)
            }
        }
    }

    /// Noisy reward `f(x) + ξ`.
    pub fn sample_reward(
        &self,
        f: &ObjectiveSpec,
        x: &[f64],
        rng: &mut RandomStream,
    ) -> Result<f64> {
        let mean = f.evaluate(x)?;
        Ok(mean + self.draw(rng))
    }
}

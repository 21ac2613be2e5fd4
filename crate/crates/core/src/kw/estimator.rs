use crate::bandit::{NoiseModel, ObjectiveSpec, Point};
use crate::error::{Error, Result};
use crate::rng::RandomStream;

/// Central-difference gradient estimate at one action.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientEstimate {
    /// `y[i] = (plus[i] − minus[i]) / (2c)`.
    pub y: Point,
    /// Noisy rewards at `x + c·e(i)`.
    pub plus: Point,
    /// Noisy rewards at `x − c·e(i)`.
    pub minus: Point,
    pub c_used: f64,
    /// Some query point had to be clamped into the domain.
    pub boundary_contact: bool,
}

impl GradientEstimate {
    /// Builds an estimate from raw paired samples.
    pub fn from_samples(plus: Point, minus: Point, c: f64, boundary_contact: bool) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::param(
                "c",
                format!("perturbation must be positive, got {c}"),
            ));
        }
        if plus.dim() != minus.dim() {
            return Err(Error::DimensionMismatch {
                expected: plus.dim(),
                actual: minus.dim(),
            });
        }
        let y = plus
            .iter()
            .zip(minus.iter())
            .map(|(p, m)| (p - m) / (2.0 * c))
            .collect();
        Ok(Self {
            y,
            plus,
            minus,
            c_used: c,
            boundary_contact,
        })
    }

    pub fn dim(&self) -> usize {
        self.y.dim()
    }
}

/// Queries `x ± c·e(i)` for every axis (2d noisy rewards, plus then minus on
/// each axis in order) and returns the central differences.
///
/// Query points outside the domain are clamped onto it and flagged.
pub fn estimate_gradient(
    objective: &ObjectiveSpec,
    noise: &NoiseModel,
    x: &[f64],
    c: f64,
    rng: &mut RandomStream,
) -> Result<GradientEstimate> {
    if !(c.is_finite() && c > 0.0) {
        return Err(Error::param(
            "c",
            format!("perturbation must be positive, got {c}"),
        ));
    }
    let domain = objective.domain();
    domain.check_contains(x)?;
    let d = x.len();
    let mut plus = Point::zeros(d);
    let mut minus = Point::zeros(d);
    let mut contact = false;
    let mut probe = Point::from(x);
    for i in 0..d {
        let (hi, hit_hi) = domain.clamp_axis(i, x[i] + c);
        probe[i] = hi;
        plus[i] = objective.value(&probe) + noise.draw(rng);
        let (lo, hit_lo) = domain.clamp_axis(i, x[i] - c);
        probe[i] = lo;
        minus[i] = objective.value(&probe) + noise.draw(rng);
        contact |= hit_hi || hit_lo;
        probe[i] = x[i];
    }
    GradientEstimate::from_samples(plus, minus, c, contact)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bandit::{Domain, ObjectiveKind};

    fn line() -> Domain {
        Domain::cube(1, -2.0, 2.0).unwrap()
    }

    #[test]
    fn central_difference_is_exact_on_quadratics() {
        let f = ObjectiveSpec::quadratic(0.0, 1.0, [0.0], &line()).unwrap();
        let mut rng = RandomStream::new(0, 0);
        let est = estimate_gradient(&f, &NoiseModel::none(), &[1.0], 0.1, &mut rng).unwrap();
        assert!((est.y[0] - (-2.0)).abs() < 1e-12);
        assert!((est.plus[0] - (-1.21)).abs() < 1e-12);
        assert!((est.minus[0] - (-0.81)).abs() < 1e-12);
        assert!(!est.boundary_contact);

        let at_theta = estimate_gradient(&f, &NoiseModel::none(), &[0.0], 0.37, &mut rng).unwrap();
        assert_eq!(at_theta.y[0], 0.0);
    }

    #[test]
    fn anisotropic_bowl() {
        let sq = Domain::cube(2, -2.0, 2.0).unwrap();
        let f = ObjectiveSpec::new(
            ObjectiveKind::QuadraticBowl {
                offset: 0.0,
                curvature: vec![1.0, 2.0],
            },
            [0.0, 0.0],
            &sq,
        )
        .unwrap();
        let mut rng = RandomStream::new(0, 0);
        let est = estimate_gradient(&f, &NoiseModel::none(), &[1.0, 1.0], 0.1, &mut rng).unwrap();
        assert!((est.y[0] + 2.0).abs() < 1e-12);
        assert!((est.y[1] + 4.0).abs() < 1e-12);
    }

    #[test]
    fn estimate_satisfies_difference_identity() {
        let sq = Domain::cube(3, -1.0, 1.0).unwrap();
        let f = ObjectiveSpec::quartic(0.0, 1.0, 0.1, [0.1, 0.2, -0.3], &sq).unwrap();
        let noise = NoiseModel::gaussian(0.5).unwrap();
        let mut rng = RandomStream::new(9, 1);
        let est = estimate_gradient(&f, &noise, &[0.3, -0.4, 0.5], 0.05, &mut rng).unwrap();
        for i in 0..3 {
            assert_eq!(est.y[i], (est.plus[i] - est.minus[i]) / (2.0 * est.c_used));
        }
    }

    #[test]
    fn boundary_queries_are_clamped_and_flagged() {
        let d = Domain::cube(1, -1.0, 1.0).unwrap();
        let f = ObjectiveSpec::quadratic(0.0, 1.0, [0.0], &d).unwrap();
        let mut rng = RandomStream::new(0, 0);
        let est = estimate_gradient(&f, &NoiseModel::none(), &[0.95], 0.1, &mut rng).unwrap();
        assert!(est.boundary_contact);
        // (f(1) − f(0.85)) / 0.2
        assert!((est.y[0] - (-1.0 + 0.85 * 0.85) / 0.2).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_inputs() {
        let f = ObjectiveSpec::quadratic(0.0, 1.0, [0.0], &line()).unwrap();
        let mut rng = RandomStream::new(0, 0);
        assert!(estimate_gradient(&f, &NoiseModel::none(), &[0.0], 0.0, &mut rng).is_err());
        assert!(estimate_gradient(&f, &NoiseModel::none(), &[3.0], 0.1, &mut rng).is_err());
    }

    #[test]
    fn quartic_bias_shrinks_quadratically() {
        let sq = Domain::cube(2, -1.0, 1.0).unwrap();
        let f = ObjectiveSpec::quartic(0.0, 1.0, 0.3, [0.1, -0.1], &sq).unwrap();
        let x = [0.4, 0.2];
        let g = f.gradient(&x).unwrap();
        let mut rng = RandomStream::new(0, 0);
        for c in [0.2, 0.1, 0.05] {
            let est = estimate_gradient(&f, &NoiseModel::none(), &x, c, &mut rng).unwrap();
            let err = est.y.distance(&g);
            assert!(err <= f.central_difference_bias_bound(c) * (1.0 + 1e-9));
        }
    }

    #[test]
    fn noisy_mean_matches_noiseless_estimate() {
        let d = Domain::cube(1, -1.0, 1.0).unwrap();
        let f = ObjectiveSpec::quartic(0.0, 1.0, 0.2, [0.2], &d).unwrap();
        let noise = NoiseModel::gaussian(1.0).unwrap();
        let c = 0.1;
        let mut rng = RandomStream::new(21, 0);
        let clean = estimate_gradient(&f, &NoiseModel::none(), &[0.5], c, &mut rng)
            .unwrap()
            .y[0];
        let n = 100_000;
        let ys: Vec<f64> = (0..n)
            .map(|_| {
                estimate_gradient(&f, &noise, &[0.5], c, &mut rng)
                    .unwrap()
                    .y[0]
            })
            .collect();
        let mean = ys.iter().sum::<f64>() / n as f64;
        let sd = (ys.iter().map(|y| (y - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt();
        assert!((mean - clean).abs() <= 3.0 * sd / (n as f64).sqrt());
    }
}

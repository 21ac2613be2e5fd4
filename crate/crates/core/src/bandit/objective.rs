use crate::bandit::domain::{Domain, Point};
use crate::error::{Error, Result};

/// Smoothness and regret constants of a function class.
///
/// `k1..k4` come from the concavity-like, growth, quadratic-bound and local
/// Lipschitz conditions. `k5` and `s0` belong to the sliding-window distance
/// bound; they are not derivable from the others and are either declared or
/// calibrated by simulation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassConstants {
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    pub k4: f64,
    pub k5: Option<f64>,
    pub s0: u64,
}

impl ClassConstants {
    pub fn new(k1: f64, k2: f64, k3: f64, k4: f64) -> Result<Self> {
        let c = Self {
            k1,
            k2,
            k3,
            k4,
            k5: None,
            s0: 0,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn with_k5(mut self, k5: f64) -> Result<Self> {
        self.k5 = Some(k5);
        self.validate()?;
        Ok(self)
    }

    pub fn with_s0(mut self, s0: u64) -> Self {
        self.s0 = s0;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let named = [
            ("k1", self.k1),
            ("k2", self.k2),
            ("k3", self.k3),
            ("k4", self.k4),
        ];
        for (name, v) in named {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::param(name, format!("must be positive, got {v}")));
            }
        }
        if let Some(k5) = self.k5 {
            if !(k5.is_finite() && k5 > 0.0) {
                return Err(Error::param("k5", format!("must be positive, got {k5}")));
            }
        }
        Ok(())
    }

    pub fn require_k5(&self) -> Result<f64> {
        self.k5.ok_or_else(|| {
            Error::param(
                "k5",
                "sliding-window constant is not declared or calibrated",
            )
        })
    }

    /// Weakest constants valid for every member of a class: the smallest
    /// concavity constant and the largest of the upper-bound constants.
    pub fn envelope(items: impl IntoIterator<Item = ClassConstants>) -> Option<Self> {
        items.into_iter().reduce(|a, b| ClassConstants {
            k1: a.k1.min(b.k1),
            k2: a.k2.max(b.k2),
            k3: a.k3.max(b.k3),
            k4: a.k4.max(b.k4),
            k5: match (a.k5, b.k5) {
                (Some(x), Some(y)) => Some(x.max(y)),
                (x, y) => x.or(y),
            },
            s0: a.s0.max(b.s0),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ObjectiveKind {
    /// `f(x) = offset − Σ_i curvature[i]·(x_i − θ_i)²`.
    QuadraticBowl { offset: f64, curvature: Vec<f64> },
    /// `f(x) = offset − b‖x − θ‖² − q‖x − θ‖⁴`.
    QuarticBowl { offset: f64, b: f64, q: f64 },
}

/// An analytic objective on a box domain with a known maximizer.
#[derive(Debug, Clone, PartialEq)]
pub struct ObjectiveSpec {
    kind: ObjectiveKind,
    theta: Point,
    domain: Domain,
    constants: ClassConstants,
}

impl ObjectiveSpec {
    pub fn new(kind: ObjectiveKind, theta: impl Into<Point>, domain: &Domain) -> Result<Self> {
        let theta = theta.into();
        domain.check_contains(&theta)?;
        match &kind {
            ObjectiveKind::QuadraticBowl { offset, curvature } => {
                if !offset.is_finite() {
                    return Err(Error::param("offset", "must be finite"));
                }
                if curvature.len() != domain.dim() {
                    return Err(Error::DimensionMismatch {
                        expected: domain.dim(),
                        actual: curvature.len(),
                    });
                }
                if curvature.iter().any(|b| !(b.is_finite() && *b > 0.0)) {
                    return Err(Error::param(
                        "curvature",
                        "every axis curvature must be positive",
                    ));
                }
            }
            ObjectiveKind::QuarticBowl { offset, b, q } => {
                if !offset.is_finite() {
                    return Err(Error::param("offset", "must be finite"));
                }
                if !(b.is_finite() && *b > 0.0) {
                    return Err(Error::param("b", "must be positive"));
                }
                if !(q.is_finite() && *q >= 0.0) {
                    return Err(Error::param("q", "must be non-negative"));
                }
            }
        }
        let constants = analytic_constants(&kind, &theta, domain);
        Ok(Self {
            kind,
            theta,
            domain: domain.clone(),
            constants,
        })
    }

    /// `a − b‖x − θ‖²`.
    pub fn quadratic(
        offset: f64,
        b: f64,
        theta: impl Into<Point>,
        domain: &Domain,
    ) -> Result<Self> {
        let curvature = vec![b; domain.dim()];
        Self::new(
            ObjectiveKind::QuadraticBowl { offset, curvature },
            theta,
            domain,
        )
    }

    pub fn quartic(
        offset: f64,
        b: f64,
        q: f64,
        theta: impl Into<Point>,
        domain: &Domain,
    ) -> Result<Self> {
        Self::new(ObjectiveKind::QuarticBowl { offset, b, q }, theta, domain)
    }

    pub fn kind(&self) -> &ObjectiveKind {
        &self.kind
    }

    pub fn theta(&self) -> &Point {
        &self.theta
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    /// Constants derived analytically from the class parameters and domain.
    pub fn constants(&self) -> &ClassConstants {
        &self.constants
    }

    pub fn dim(&self) -> usize {
        self.theta.dim()
    }

    /// Value at the maximizer.
    pub fn max_value(&self) -> f64 {
        match &self.kind {
            ObjectiveKind::QuadraticBowl { offset, .. }
            | ObjectiveKind::QuarticBowl { offset, .. } => *offset,
        }
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        self.domain.check_contains(x)?;
        Ok(self.value(x))
    }

    pub fn gradient(&self, x: &[f64]) -> Result<Point> {
        self.domain.check_contains(x)?;
        Ok(self.gradient_unchecked(x))
    }

    /// `f(θ) − f(x)`, computed without cancellation.
    pub fn gap(&self, x: &[f64]) -> f64 {
        match &self.kind {
            ObjectiveKind::QuadraticBowl { curvature, .. } => x
                .iter()
                .zip(self.theta.iter())
                .zip(curvature.iter())
                .map(|((xi, ti), b)| b * (xi - ti) * (xi - ti))
                .sum(),
            ObjectiveKind::QuarticBowl { b, q, .. } => {
                let r2 = self.radius_squared(x);
                b * r2 + q * r2 * r2
            }
        }
    }

    /// Evaluation without the domain check; callers guarantee `x ∈ D`.
    pub(crate) fn value(&self, x: &[f64]) -> f64 {
        self.max_value() - self.gap(x)
    }

    pub(crate) fn gradient_unchecked(&self, x: &[f64]) -> Point {
        match &self.kind {
            ObjectiveKind::QuadraticBowl { curvature, .. } => x
                .iter()
                .zip(self.theta.iter())
                .zip(curvature.iter())
                .map(|((xi, ti), b)| -2.0 * b * (xi - ti))
                .collect(),
            ObjectiveKind::QuarticBowl { b, q, .. } => {
                let r2 = self.radius_squared(x);
                let scale = -(2.0 * b + 4.0 * q * r2);
                x.iter()
                    .zip(self.theta.iter())
                    .map(|(xi, ti)| scale * (xi - ti))
                    .collect()
            }
        }
    }

    fn radius_squared(&self, x: &[f64]) -> f64 {
        x.iter()
            .zip(self.theta.iter())
            .map(|(xi, ti)| (xi - ti) * (xi - ti))
            .sum()
    }

    /// Upper bound on ‖E[Y] − ∇f(x)‖ for noiseless central differences with
    /// half-width `c` at interior points.
    ///
    /// Quadratics are differentiated exactly. For the quartic bowl the
    /// per-axis restriction is a degree-4 polynomial, so the bias is exactly
    /// `c²·g'''(0)/6 = −4q c² (x_i − θ_i)`.
    pub fn central_difference_bias_bound(&self, c: f64) -> f64 {
        match &self.kind {
            ObjectiveKind::QuadraticBowl { .. } => 0.0,
            ObjectiveKind::QuarticBowl { q, .. } => {
                4.0 * q * c * c * self.domain.max_distance_from(&self.theta)
            }
        }
    }

    /// Bound on the mean-value offset ε with `E[Y | x] = ∇f(x + ε_x)`.
    ///
    /// `−f` is 2b-strongly convex for both classes, so ‖ε_x‖ ≤ bias / (2 b_min).
    pub fn mean_value_offset(&self, c: f64) -> f64 {
        match &self.kind {
            ObjectiveKind::QuadraticBowl { .. } => 0.0,
            ObjectiveKind::QuarticBowl { b, .. } => {
                self.central_difference_bias_bound(c) / (2.0 * b)
            }
        }
    }
}

fn analytic_constants(kind: &ObjectiveKind, theta: &Point, domain: &Domain) -> ClassConstants {
    match kind {
        ObjectiveKind::QuadraticBowl { curvature, .. } => {
            let b_min = curvature.iter().copied().fold(f64::INFINITY, f64::min);
            let b_max = curvature.iter().copied().fold(0.0, f64::max);
            ClassConstants {
                k1: 2.0 * b_min,
                k2: 2.0 * b_max,
                k3: b_max,
                k4: 2.0 * b_max,
                k5: None,
                s0: 0,
            }
        }
        ObjectiveKind::QuarticBowl { b, q, .. } => {
            // R is the largest ‖x − θ‖ over the box.
            let r = domain.max_distance_from(theta);
            let r2 = r * r;
            ClassConstants {
                k1: 2.0 * b,
                k2: 2.0 * b + 4.0 * q * r2,
                k3: b + q * r2,
                // Hessian = −(2b + 4q r²) I − 8q u uᵀ, spectral norm 2b + 12 q r².
                k4: 2.0 * b + 12.0 * q * r2,
                k5: None,
                s0: 0,
            }
        }
    }
}

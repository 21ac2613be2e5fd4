use std::ops::{Deref, DerefMut};

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};

/// A point (action or iterate) in R^d.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point(SmallVec<[f64; 4]>);

impl Point {
    pub fn zeros(dim: usize) -> Self {
        Point(SmallVec::from_elem(0.0, dim))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn norm_squared(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum()
    }

    pub fn distance_squared(&self, other: &Point) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b) * (a - b))
            .sum()
    }

    pub fn distance(&self, other: &Point) -> f64 {
        self.distance_squared(other).sqrt()
    }

    pub fn dot(&self, other: &Point) -> f64 {
        self.0.iter().zip(other.0.iter()).map(|(a, b)| a * b).sum()
    }

    pub fn sub(&self, other: &Point) -> Point {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| a - b)
            .collect()
    }

    /// `self += scale * direction`, componentwise.
    pub fn add_scaled(&mut self, scale: f64, direction: &Point) {
        for (a, b) in self.0.iter_mut().zip(direction.0.iter()) {
            *a += scale * b;
        }
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

impl Deref for Point {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl DerefMut for Point {
    fn deref_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }
}

impl From<Vec<f64>> for Point {
    fn from(v: Vec<f64>) -> Self {
        Point(SmallVec::from_vec(v))
    }
}

impl From<&[f64]> for Point {
    fn from(v: &[f64]) -> Self {
        Point(SmallVec::from_slice(v))
    }
}

impl<const N: usize> From<[f64; N]> for Point {
    fn from(v: [f64; N]) -> Self {
        Point(SmallVec::from_slice(&v))
    }
}

impl FromIterator<f64> for Point {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        Point(iter.into_iter().collect())
    }
}

/// Axis-aligned box `[lower, upper] ⊂ R^d` with nonempty interior.
#[derive(Debug, Clone, PartialEq)]
pub struct Domain {
    lower: Point,
    upper: Point,
    diameter: f64,
}

impl Domain {
    pub fn new(lower: impl Into<Point>, upper: impl Into<Point>) -> Result<Self> {
        let lower = lower.into();
        let upper = upper.into();
        if lower.dim() == 0 {
            return Err(Error::param("domain", "dimension must be at least 1"));
        }
        if lower.dim() != upper.dim() {
            return Err(Error::DimensionMismatch {
                expected: lower.dim(),
                actual: upper.dim(),
            });
        }
        for (i, (lo, hi)) in lower.iter().zip(upper.iter()).enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::param(
                    "domain",
                    format!("axis {i}: need finite lower < upper, got [{lo}, {hi}]"),
                ));
            }
        }
        let diameter = upper.distance(&lower);
        Ok(Self {
            lower,
            upper,
            diameter,
        })
    }

    /// The cube `[lo, hi]^dim`.
    pub fn cube(dim: usize, lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![lo; dim], vec![hi; dim])
    }

    pub fn dim(&self) -> usize {
        self.lower.dim()
    }

    pub fn lower(&self) -> &Point {
        &self.lower
    }

    pub fn upper(&self) -> &Point {
        &self.upper
    }

    /// Euclidean diameter, the constant K of the regret bounds.
    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter()
                .zip(self.lower.iter().zip(self.upper.iter()))
                .all(|(v, (lo, hi))| *lo <= *v && *v <= *hi)
    }

    pub fn check_contains(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: x.len(),
            });
        }
        for (axis, (v, (lo, hi))) in x
            .iter()
            .zip(self.lower.iter().zip(self.upper.iter()))
            .enumerate()
        {
            if !(*lo <= *v && *v <= *hi) {
                return Err(Error::DomainViolation {
                    point: x.to_vec(),
                    axis,
                });
            }
        }
        Ok(())
    }

    /// Euclidean projection: componentwise clamp onto the box.
    pub fn project(&self, x: &Point) -> Point {
        let mut out = x.clone();
        self.project_in_place(&mut out);
        out
    }

    /// Clamps `x` into the box; returns whether any coordinate moved.
    pub fn project_in_place(&self, x: &mut [f64]) -> bool {
        let mut clamped = false;
        for (v, (lo, hi)) in x.iter_mut().zip(self.lower.iter().zip(self.upper.iter())) {
            if *v < *lo {
                *v = *lo;
                clamped = true;
            } else if *v > *hi {
                *v = *hi;
                clamped = true;
            } else if v.is_nan() {
                *v = 0.5 * (lo + hi);
                clamped = true;
            }
        }
        clamped
    }

    /// Clamps one coordinate onto its interval; reports whether it moved.
    pub fn clamp_axis(&self, axis: usize, v: f64) -> (f64, bool) {
        let (lo, hi) = (self.lower[axis], self.upper[axis]);
        if v < lo {
            (lo, true)
        } else if v > hi {
            (hi, true)
        } else {
            (v, false)
        }
    }

    /// Largest distance from `x` to any corner of the box.
    pub fn max_distance_from(&self, x: &[f64]) -> f64 {
        x.iter()
            .zip(self.lower.iter().zip(self.upper.iter()))
            .map(|(v, (lo, hi))| {
                let far = (v - lo).abs().max((hi - v).abs());
                far * far
            })
            .sum::<f64>()
            .sqrt()
    }

    /// Regular grid with `per_axis` points on every axis, endpoints included.
    pub fn grid(&self, per_axis: usize) -> Vec<Point> {
        let d = self.dim();
        let total = per_axis.pow(d as u32);
        let mut out = Vec::with_capacity(total);
        let mut idx = vec![0usize; d];
        for _ in 0..total {
            out.push(
                idx.iter()
                    .enumerate()
                    .map(|(axis, &k)| self.grid_coordinate(axis, k, per_axis))
                    .collect(),
            );
            for slot in idx.iter_mut() {
                *slot += 1;
                if *slot < per_axis {
                    break;
                }
                *slot = 0;
            }
        }
        out
    }

    fn grid_coordinate(&self, axis: usize, k: usize, per_axis: usize) -> f64 {
        let lo = self.lower[axis];
        let hi = self.upper[axis];
        if k + 1 == per_axis {
            hi
        } else {
            lo + (hi - lo) * k as f64 / (per_axis - 1) as f64
        }
    }
}

//! Grid verification of the smoothness conditions on a synthetic objective.
//!
//! Checked conditions, for all grid points `x` (and neighbouring grid pairs
//! `x, y` for the Lipschitz check):
//!
//! * CL:  `(x − θ)ᵀ∇f(x) ≤ −K1‖x − θ‖²`
//! * LBG: `‖∇f(x)‖ ≤ K2‖x − θ‖`
//! * QB:  `f(θ) − f(x) ≤ K3‖x − θ‖²`
//! * Lipschitz: `‖∇f(x) − ∇f(y)‖ ≤ K4‖x − y‖` whenever `‖x − y‖ ≤ ε`

use crate::bandit::domain::{Domain, Point};
use crate::bandit::objective::{ClassConstants, ObjectiveSpec};
use crate::error::{Error, Result};

/// Relative slack allowed when a condition holds with equality.
const REL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Condition {
    ConcavityLike,
    LinearGrowth,
    QuadraticBound,
    LocalLipschitz,
}

impl Condition {
    pub fn label(self) -> &'static str {
        match self {
            Condition::ConcavityLike => "CL",
            Condition::LinearGrowth => "LBG",
            Condition::QuadraticBound => "QB",
            Condition::LocalLipschitz => "Lipschitz",
        }
    }
}

#[derive(Debug, Clone)]
pub struct ConditionCheck {
    pub condition: Condition,
    pub declared: f64,
    /// Best constant supported by the grid (min for CL, max otherwise).
    pub tightest: f64,
    pub violations: usize,
    /// Grid point with the largest violation, if any.
    pub worst_point: Option<Point>,
}

impl ConditionCheck {
    pub fn holds(&self) -> bool {
        self.violations == 0
    }
}

#[derive(Debug, Clone)]
pub struct ConditionReport {
    pub grid_points_per_axis: usize,
    pub points_checked: usize,
    pub pairs_checked: usize,
    /// Neighbourhood radius used for the Lipschitz check.
    pub lipschitz_radius: f64,
    pub checks: Vec<ConditionCheck>,
}

impl ConditionReport {
    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(ConditionCheck::holds)
    }

    pub fn check(&self, condition: Condition) -> &ConditionCheck {
        self.checks
            .iter()
            .find(|c| c.condition == condition)
            .expect("every condition is checked")
    }
}

struct Tracker {
    check: ConditionCheck,
    worst_excess: f64,
}

impl Tracker {
    fn new(condition: Condition, declared: f64, start: f64) -> Self {
        Self {
            check: ConditionCheck {
                condition,
                declared,
                tightest: start,
                violations: 0,
                worst_point: None,
            },
            worst_excess: 0.0,
        }
    }

    /// Records `lhs ≤ rhs` at `x`, allowing a relative tolerance.
    fn record(&mut self, lhs: f64, rhs: f64, x: &Point) {
        let excess = lhs - rhs;
        let slack = REL_TOL * lhs.abs().max(rhs.abs()).max(f64::MIN_POSITIVE);
        if excess > slack {
            self.check.violations += 1;
            if excess > self.worst_excess {
                self.worst_excess = excess;
                self.check.worst_point = Some(x.clone());
            }
        }
    }
}

pub fn verify_conditions(
    f: &ObjectiveSpec,
    declared: &ClassConstants,
    domain: &Domain,
    grid_points_per_axis: usize,
) -> Result<ConditionReport> {
    if grid_points_per_axis < 2 {
        return Err(Error::param(
            "grid_points_per_axis",
            format!("need at least 2, got {grid_points_per_axis}"),
        ));
    }
    if domain.dim() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            actual: domain.dim(),
        });
    }
    let theta = f.theta();
    let f_theta = f.value(theta);
    let points = domain.grid(grid_points_per_axis);
    let gradients: Vec<Point> = points.iter().map(|x| f.gradient_unchecked(x)).collect();

    let mut cl = Tracker::new(Condition::ConcavityLike, declared.k1, f64::INFINITY);
    let mut lbg = Tracker::new(Condition::LinearGrowth, declared.k2, 0.0);
    let mut qb = Tracker::new(Condition::QuadraticBound, declared.k3, 0.0);
    let mut lip = Tracker::new(Condition::LocalLipschitz, declared.k4, 0.0);

    for (x, grad) in points.iter().zip(&gradients) {
        let u = x.sub(theta);
        let r2 = u.norm_squared();
        let inner = u.dot(grad);
        let gap = f_theta - f.value(x);
        cl.record(inner, -declared.k1 * r2, x);
        lbg.record(grad.norm(), declared.k2 * r2.sqrt(), x);
        qb.record(gap, declared.k3 * r2, x);
        if r2 > 0.0 {
            cl.check.tightest = cl.check.tightest.min(-inner / r2);
            lbg.check.tightest = lbg.check.tightest.max(grad.norm() / r2.sqrt());
            qb.check.tightest = qb.check.tightest.max(gap / r2);
        }
    }

    let n = grid_points_per_axis;
    let d = domain.dim();
    let offsets = forward_neighbour_offsets(d);
    let mut pairs = 0usize;
    let mut idx = vec![0usize; d];
    for (flat, x) in points.iter().enumerate() {
        decompose(flat, n, &mut idx);
        for off in &offsets {
            let Some(other) = neighbour(&idx, off, n) else {
                continue;
            };
            let y = &points[other];
            let dist = x.distance(y);
            let diff = gradients[flat].distance(&gradients[other]);
            lip.record(diff, declared.k4 * dist, x);
            lip.check.tightest = lip.check.tightest.max(diff / dist);
            pairs += 1;
        }
    }
    let lipschitz_radius = domain
        .lower()
        .iter()
        .zip(domain.upper().iter())
        .map(|(lo, hi)| {
            let h = (hi - lo) / (n - 1) as f64;
            h * h
        })
        .sum::<f64>()
        .sqrt();

    Ok(ConditionReport {
        grid_points_per_axis: n,
        points_checked: points.len(),
        pairs_checked: pairs,
        lipschitz_radius,
        checks: vec![cl.check, lbg.check, qb.check, lip.check],
    })
}

/// Offsets in {−1, 0, 1}^d whose first nonzero entry is +1, so each
/// unordered neighbour pair is visited once.
fn forward_neighbour_offsets(d: usize) -> Vec<Vec<i64>> {
    let total = 3usize.pow(d as u32);
    (0..total)
        .map(|mut code| {
            (0..d)
                .map(|_| {
                    let v = (code % 3) as i64 - 1;
                    code /= 3;
                    v
                })
                .collect::<Vec<i64>>()
        })
        .filter(|off| off.iter().find(|v| **v != 0) == Some(&1))
        .collect()
}

fn decompose(mut flat: usize, n: usize, idx: &mut [usize]) {
    for slot in idx.iter_mut() {
        *slot = flat % n;
        flat /= n;
    }
}

fn neighbour(idx: &[usize], off: &[i64], n: usize) -> Option<usize> {
    let mut flat = 0usize;
    let mut stride = 1usize;
    for (&k, &o) in idx.iter().zip(off) {
        let j = k as i64 + o;
        if j < 0 || j >= n as i64 {
            return None;
        }
        flat += j as usize * stride;
        stride *= n;
    }
    Some(flat)
}

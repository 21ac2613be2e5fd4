use std::collections::BTreeMap;

use crate::bandit::ClassConstants;
use crate::error::{Error, Result};
use crate::regret::bounds::{distance_bound, fixed_step_bound};
use crate::regret::{
    bound_sliding_window, bound_sliding_window_episode, normalized_regret_bound_kwb,
    normalized_regret_bound_kwl, BoundName, BoundReport, FixedStepInputs,
};

/// Named numeric parameters, e.g. parsed from `key=value` pairs.
pub type Params = BTreeMap<String, f64>;

/// Parses `key=value`.
pub fn parse_param(text: &str) -> Result<(String, f64)> {
    let (k, v) = text
        .split_once('=')
        .ok_or_else(|| Error::param("param", format!("expected key=value, got `{text}`")))?;
    let v: f64 = v
        .trim()
        .parse()
        .map_err(|_| Error::param("param", format!("`{k}` is not a number: `{v}`")))?;
    Ok((k.trim().to_string(), v))
}

struct Lookup<'a> {
    params: &'a Params,
    missing: Vec<String>,
}

impl Lookup<'_> {
    fn get(&mut self, key: &str) -> f64 {
        match self.params.get(key) {
            Some(v) => *v,
            None => {
                self.missing.push(key.to_string());
                f64::NAN
            }
        }
    }

    fn get_or(&self, key: &str, default: f64) -> f64 {
        self.params.get(key).copied().unwrap_or(default)
    }

    fn count(&mut self, key: &str) -> u64 {
        let v = self.get(key);
        if v.is_finite() && v >= 0.0 && v.fract() == 0.0 {
            v as u64
        } else {
            if !v.is_nan() {
                self.missing.push(format!("{key} (non-negative integer)"));
            }
            0
        }
    }

    fn done(self) -> Result<()> {
        if self.missing.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(
                self.missing
                    .into_iter()
                    .map(|k| format!("missing or invalid parameter `{k}`"))
                    .collect(),
            ))
        }
    }

    fn fixed_step_inputs(&mut self) -> FixedStepInputs {
        FixedStepInputs {
            constants: ClassConstants {
                k1: self.get("k1"),
                k2: self.get("k2"),
                k3: self.get_or("k3", 1.0),
                k4: self.get("k4"),
                k5: None,
                s0: 0,
            },
            beta: self.get_or("beta", 0.0),
            c: self.get("c"),
            sigma_tilde2: self.get("sigma_tilde2"),
            diameter: self.get("diameter"),
            epsilon: self.get_or("epsilon", 0.0),
        }
    }

    fn window_constants(&mut self) -> Result<ClassConstants> {
        let k3 = self.get("k3");
        let k5 = self.get("k5");
        let s0 = self.get_or("s0", 0.0) as u64;
        if k3.is_nan() || k5.is_nan() {
            return Ok(ClassConstants {
                k1: 1.0,
                k2: 1.0,
                k3: 1.0,
                k4: 1.0,
                k5: Some(1.0),
                s0,
            });
        }
        Ok(ClassConstants::new(1.0, 1.0, k3, 1.0)?
            .with_k5(k5)?
            .with_s0(s0))
    }
}

/// Evaluates any bound from named parameters alone, without simulation.
///
/// Keys: `k1 k2 k3 k4 k5 s0 beta c sigma_tilde2 diameter epsilon alpha s
/// x0_dist2 horizon delta_t window length`; each bound reads the subset it
/// needs. The lemma-2 bound evaluates its right-hand side
/// `γ·distance_s + H(β)`.
pub fn evaluate_named_bound(name: BoundName, params: &Params) -> Result<BoundReport> {
    let mut p = Lookup {
        params,
        missing: Vec::new(),
    };
    match name {
        BoundName::ClosedFormDistance | BoundName::Lemma2Recursion => {
            let inputs = p.fixed_step_inputs();
            let (s, start) = if name == BoundName::ClosedFormDistance {
                (p.count("s"), p.get("x0_dist2"))
            } else {
                (1, p.get("distance_s"))
            };
            p.done()?;
            let gamma = inputs.gamma()?;
            let h = inputs.h()?;
            let value = if name == BoundName::ClosedFormDistance {
                distance_bound(h, gamma, s, start)?
            } else {
                gamma * start + h
            };
            Ok(BoundReport {
                name,
                value,
                inputs: vec![
                    ("gamma", gamma),
                    ("h", h),
                    ("s", s as f64),
                    ("start", start),
                ],
            })
        }
        BoundName::FixedStepStationary | BoundName::FixedStepNonstationary => {
            let inputs = p.fixed_step_inputs();
            let horizon = p.count("horizon");
            let episodes = if name == BoundName::FixedStepStationary {
                1
            } else {
                p.count("delta_t")
            };
            p.done()?;
            let gamma = inputs.gamma()?;
            let h = inputs.h()?;
            let value = fixed_step_bound(
                h,
                gamma,
                inputs.constants.k3,
                inputs.diameter,
                horizon,
                episodes,
            )?;
            Ok(BoundReport {
                name,
                value,
                inputs: vec![
                    ("gamma", gamma),
                    ("h", h),
                    ("horizon", horizon as f64),
                    ("delta_t", episodes as f64),
                ],
            })
        }
        BoundName::NormalizedRegretKwb => {
            let inputs = p.fixed_step_inputs();
            let alpha = p.get("alpha");
            let horizon = p.count("horizon");
            let episodes = p.count("delta_t");
            p.done()?;
            normalized_regret_bound_kwb(&inputs, alpha, horizon, episodes)
        }
        BoundName::SlidingWindowTotal => {
            let k = p.window_constants()?;
            let diameter = p.get("diameter");
            let window = p.count("window") as usize;
            let horizon = p.count("horizon");
            let episodes = p.count("delta_t");
            p.done()?;
            bound_sliding_window(&k, diameter, window, horizon, episodes)
        }
        BoundName::SlidingWindowPerEpisode => {
            let k = p.window_constants()?;
            let diameter = p.get("diameter");
            let window = p.count("window") as usize;
            let length = p.count("length");
            p.done()?;
            bound_sliding_window_episode(&k, diameter, window, length)
        }
        BoundName::NormalizedRegretKwl => {
            let k5 = p.get("k5");
            let diameter = p.get("diameter");
            let horizon = p.count("horizon");
            let episodes = p.count("delta_t");
            p.done()?;
            normalized_regret_bound_kwl(k5, diameter, horizon, episodes)
        }
    }
}

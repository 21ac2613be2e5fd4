//! Closed-form tuning calculators. All are pure functions of their inputs.

use crate::error::{Error, Result};

fn positive(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::param(name, format!("must be positive, got {v}")))
    }
}

fn non_negative(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(Error::param(name, format!("must be non-negative, got {v}")))
    }
}

fn horizon_and_episodes(horizon: u64, episodes: u64) -> Result<()> {
    if horizon == 0 {
        return Err(Error::param("horizon", "must be at least 1"));
    }
    if episodes == 0 || episodes > horizon {
        return Err(Error::param(
            "delta_t",
            format!("episode count must lie in [1, {horizon}], got {episodes}"),
        ));
    }
    Ok(())
}

/// Contraction factor `γ = 1 − 2βK1 + 2β²K2²`; errors unless `γ < 1`.
pub fn gamma(beta: f64, k1: f64, k2: f64) -> Result<f64> {
    positive("beta", beta)?;
    positive("k1", k1)?;
    positive("k2", k2)?;
    let g = 1.0 - 2.0 * beta * k1 + 2.0 * beta * beta * k2 * k2;
    if g < 1.0 {
        Ok(g)
    } else {
        Err(Error::ContractionViolation { gamma: g })
    }
}

/// Per-step error floor `H(β) = β²σ̃²/c² + 2K·K4·β·ε + 2β²K2²ε²`.
///
/// Requires the mean-value offset to satisfy `ε < c²`.
pub fn h_beta(
    beta: f64,
    c: f64,
    sigma_tilde2: f64,
    diameter: f64,
    k4: f64,
    k2: f64,
    epsilon: f64,
) -> Result<f64> {
    non_negative("beta", beta)?;
    positive("c", c)?;
    non_negative("sigma_tilde2", sigma_tilde2)?;
    non_negative("diameter", diameter)?;
    non_negative("k4", k4)?;
    non_negative("k2", k2)?;
    non_negative("epsilon", epsilon)?;
    if epsilon >= c * c {
        return Err(Error::MeanValueViolation {
            epsilon,
            c_squared: c * c,
        });
    }
    Ok(beta * beta * sigma_tilde2 / (c * c)
        + 2.0 * diameter * k4 * beta * epsilon
        + 2.0 * beta * beta * k2 * k2 * epsilon * epsilon)
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha.is_finite() && alpha > 0.0 && alpha <= 1.0 {
        Ok(())
    } else {
        Err(Error::param(
            "alpha",
            format!("must lie in (0, 1], got {alpha}"),
        ))
    }
}

/// `Λ = (K²/σ̃²)^{1/(2+α)}`.
pub fn lambda(diameter: f64, sigma_tilde2: f64, alpha: f64) -> Result<f64> {
    positive("diameter", diameter)?;
    positive("sigma_tilde2", sigma_tilde2)?;
    check_alpha(alpha)?;
    Ok((diameter * diameter / sigma_tilde2).powf(1.0 / (2.0 + alpha)))
}

/// Optimal fixed step `β* = Λ·(Δ_T/T)^{1/(2+α)}`.
pub fn beta_star(
    diameter: f64,
    sigma_tilde2: f64,
    alpha: f64,
    horizon: u64,
    episodes: u64,
) -> Result<f64> {
    horizon_and_episodes(horizon, episodes)?;
    let lam = lambda(diameter, sigma_tilde2, alpha)?;
    Ok(lam * (episodes as f64 / horizon as f64).powf(1.0 / (2.0 + alpha)))
}

/// Real-valued window minimiser `(K5/(2K) · T/Δ_T)^{2/3}`.
pub fn l_star_real(k5: f64, diameter: f64, horizon: u64, episodes: u64) -> Result<f64> {
    positive("k5", k5)?;
    positive("diameter", diameter)?;
    horizon_and_episodes(horizon, episodes)?;
    Ok((k5 / (2.0 * diameter) * horizon as f64 / episodes as f64).powf(2.0 / 3.0))
}

/// [`l_star_real`] rounded to the nearest integer, at least 1.
pub fn l_star(k5: f64, diameter: f64, horizon: u64, episodes: u64) -> Result<usize> {
    let l = l_star_real(k5, diameter, horizon, episodes)?;
    Ok((l.round() as usize).max(1))
}

/// Step size coupled to the perturbation, `β = c^{2/(1−α)}`, α ∈ (0, 1).
pub fn coupled_beta(c: f64, alpha: f64) -> Result<f64> {
    positive("c", c)?;
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::param(
            "alpha",
            format!("coupling needs α in (0, 1), got {alpha}"),
        ));
    }
    Ok(c.powf(2.0 / (1.0 - alpha)))
}

/// Inverse of [`coupled_beta`]: `c = β^{(1−α)/2}`.
pub fn coupled_c(beta: f64, alpha: f64) -> Result<f64> {
    positive("beta", beta)?;
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::param(
            "alpha",
            format!("coupling needs α in (0, 1), got {alpha}"),
        ));
    }
    Ok(beta.powf((1.0 - alpha) / 2.0))
}

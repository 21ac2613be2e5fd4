use crate::error::{Error, Result};

/// Least-squares line through `(log scale, log value)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    pub points: usize,
}

/// Fits `value ≈ e^intercept · scale^slope`.
pub fn fit_scaling_exponent(pairs: &[(f64, f64)]) -> Result<ExponentFit> {
    if pairs.len() < 3 {
        return Err(Error::param(
            "pairs",
            format!("need at least 3 points, got {}", pairs.len()),
        ));
    }
    if let Some((s, v)) = pairs
        .iter()
        .find(|(s, v)| !(s.is_finite() && *s > 0.0 && v.is_finite() && *v > 0.0))
    {
        return Err(Error::param(
            "pairs",
            format!("scales and values must be positive, got ({s}, {v})"),
        ));
    }
    let n = pairs.len() as f64;
    let xs: Vec<f64> = pairs.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = pairs.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::param("pairs", "all scales are equal"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy <= f64::EPSILON * f64::EPSILON * n {
        1.0
    } else {
        let sse: f64 = xs
            .iter()
            .zip(&ys)
            .map(|(x, y)| {
                let e = y - (intercept + slope * x);
                e * e
            })
            .sum();
        1.0 - sse / syy
    };
    Ok(ExponentFit {
        slope,
        intercept,
        r2,
        points: pairs.len(),
    })
}

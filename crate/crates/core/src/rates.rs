//! Log-log rate fits.

use crate::error::{Error, Result};

/// Gaps at or below this are treated as solved exactly and refuse a fit.
pub const EXACT_GAP: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Least-squares line through `(x_i, y_i)`.
pub fn least_squares(xs: &[f64], ys: &[f64]) -> Result<RateFit> {
    if xs.len() != ys.len() {
        return Err(Error::DimensionMismatch { expected: xs.len(), got: ys.len() });
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if !(sxx > 0.0) {
        return Err(Error::DegenerateFit("abscissae are all equal".into()));
    }
    let slope = sxy / sxx;
    let r_squared = if syy > 0.0 { sxy * sxy / (sxx * syy) } else { 1.0 };
    Ok(RateFit { slope, intercept: my - slope * mx, r_squared })
}

/// Fits `log gap = slope * log T + intercept`.
pub fn fit_rate_slope(points: &[(f64, f64)]) -> Result<RateFit> {
    if points.len() < 3 {
        return Err(Error::DegenerateFit(format!("need at least 3 points, got {}", points.len())));
    }
    if let Some((t, g)) = points.iter().find(|(_, g)| !(*g > EXACT_GAP)) {
        return Err(Error::DegenerateFit(format!("gap {g:e} at T = {t} is solved to machine precision")));
    }
    if points.iter().any(|(t, _)| !(*t > 0.0)) {
        return Err(Error::DegenerateFit("horizons must be positive".into()));
    }
    let xs: Vec<f64> = points.iter().map(|(t, _)| t.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|(_, g)| g.ln()).collect();
    least_squares(&xs, &ys)
}

/// Fits `log gap = slope * t + intercept` (linear convergence).
pub fn fit_linear_rate(gaps: &[(f64, f64)]) -> Result<RateFit> {
    if gaps.len() < 3 {
        return Err(Error::DegenerateFit(format!("need at least 3 points, got {}", gaps.len())));
    }
    if let Some((t, g)) = gaps.iter().find(|(_, g)| !(*g > 0.0)) {
        return Err(Error::DegenerateFit(format!("non-positive gap {g:e} at t = {t}")));
    }
    let xs: Vec<f64> = gaps.iter().map(|(t, _)| *t).collect();
    let ys: Vec<f64> = gaps.iter().map(|(_, g)| g.ln()).collect();
    least_squares(&xs, &ys)
}

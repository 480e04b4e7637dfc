//! Least-squares power laws `y = c·x^e` on log–log axes.

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct FitResult {
    pub exponent: f64,
    pub coefficient: f64,
    /// Root-mean-square residual of `ln y`.
    pub residual: f64,
    pub points_used: usize,
    /// Points dropped because `x ≤ 0` or `y ≤ 0` (or non-finite).
    pub warnings: Vec<String>,
}

pub fn fit_power_law(points: &[(f64, f64)]) -> Result<FitResult> {
    let mut warnings = Vec::new();
    let mut logs = Vec::with_capacity(points.len());
    for &(x, y) in points {
        if x > 0.0 && y > 0.0 && x.is_finite() && y.is_finite() {
            logs.push((x.ln(), y.ln()));
        } else {
            warnings.push(format!("excluded point ({x}, {y}): not positive"));
        }
    }
    if logs.len() < 3 {
        return Err(Error::Validation(format!(
            "power-law fit needs at least 3 positive points, got {}",
            logs.len()
        )));
    }
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Validation("power-law fit needs distinct abscissae".into()));
    }
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let exponent = sxy / sxx;
    let intercept = my - exponent * mx;
    let rss: f64 = logs.iter().map(|p| (p.1 - intercept - exponent * p.0).powi(2)).sum();
    Ok(FitResult { exponent, coefficient: intercept.exp(), residual: (rss / n).sqrt(), points_used: logs.len(), warnings })
}

//! Log-log regression of regret against horizon, used to estimate the
//! empirical growth exponent R(T) ~ T^slope.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    /// (T, regret) pairs that entered the fit.
    pub used: Vec<(f64, f64)>,
    /// Pairs dropped because regret was not positive (log undefined).
    pub excluded: Vec<(f64, f64)>,
}

/// Ordinary least squares on (ln T, ln R). Nonpositive regrets are excluded;
/// fewer than four usable points is an error.
pub fn fit_scaling_exponent(points: &[(f64, f64)]) -> Result<FitResult> {
    let mut used = Vec::new();
    let mut excluded = Vec::new();
    for &(t, r) in points {
        if t > 0.0 && r > 0.0 {
            used.push((t, r));
        } else {
            excluded.push((t, r));
        }
    }
    if used.len() < 4 {
        return Err(Error::invalid_input(format!(
            "scaling fit needs at least 4 positive points, have {}",
            used.len()
        )));
    }
    let n = used.len() as f64;
    let xs: Vec<f64> = used.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = used.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::invalid_input("all horizons identical; slope undefined"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_tot: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - (intercept + slope * x)).powi(2))
        .sum();
    let r2 = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    Ok(FitResult { slope, intercept, r2, used, excluded })
}

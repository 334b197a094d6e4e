//! Least-squares rate fitting.

use crate::error::{domain, Result};

/// `y = slope x + intercept` with its coefficient of determination.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Fit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Ordinary least squares on `(x, y)`; `r^2` is clamped to `[0, 1]` and is 1
/// when `y` has no spread.
pub fn fit_linear(points: &[(f64, f64)]) -> Result<Fit> {
    if points.len() < 3 {
        return domain(format!("a fit needs at least 3 points, got {}", points.len()));
    }
    if points.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
        return domain("fit points must be finite");
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx == 0.0 {
        return domain("fit abscissae are all equal");
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = points.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let r_squared = if syy <= f64::EPSILON * my.abs().max(1.0) * n { 1.0 } else { (1.0 - ss_res / syy).clamp(0.0, 1.0) };
    Ok(Fit { slope, intercept, r_squared })
}

/// OLS on `(log x, log |y|)`; `x` must be positive and strictly increasing,
/// `y` nonzero.
pub fn fit_loglog(points: &[(f64, f64)]) -> Result<Fit> {
    if points.len() < 3 {
        return domain(format!("a fit needs at least 3 points, got {}", points.len()));
    }
    if points.windows(2).any(|w| !(w[1].0 > w[0].0)) || points[0].0 <= 0.0 {
        return domain("fit abscissae must be positive and strictly increasing");
    }
    if points.iter().any(|p| p.1 == 0.0) {
        return domain("log-log fit needs nonzero ordinates");
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.abs().ln())).collect();
    fit_linear(&logs)
}

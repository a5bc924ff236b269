//! Weighted power-law fitting in log-log coordinates.

use crate::error::{Error, Result};
use serde::Serialize;

/// One measured scale point: (scale, estimate, estimate stderr).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct FitPoint {
    pub scale: f64,
    pub estimate: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FitResult {
    /// Fitted exponent of estimate ~ scale^slope.
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope.
    pub stderr: f64,
    pub points: Vec<FitPoint>,
    pub r_squared: f64,
    /// Scales dropped by the deterministic small-scale leverage rule.
    pub excluded_scales: Vec<f64>,
}

fn weighted_fit(xs: &[f64], ys: &[f64], ws: &[f64]) -> (f64, f64, f64, f64) {
    let sw: f64 = ws.iter().sum();
    let mx = xs.iter().zip(ws).map(|(x, w)| x * w).sum::<f64>() / sw;
    let my = ys.iter().zip(ws).map(|(y, w)| y * w).sum::<f64>() / sw;
    let sxx: f64 = xs.iter().zip(ws).map(|(x, w)| w * (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs
        .iter()
        .zip(ys)
        .zip(ws)
        .map(|((x, y), w)| w * (x - mx) * (y - my))
        .sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let stderr = (1.0 / sxx).sqrt();
    let syy: f64 = ys.iter().zip(ws).map(|(y, w)| w * (y - my) * (y - my)).sum();
    let r2 = if syy > 0.0 { (sxy * sxy) / (sxx * syy) } else { 1.0 };
    (slope, intercept, stderr, r2)
}

/// Weighted least squares of log(estimate) on log(scale). Each point's
/// stderr propagates to log space to first order (sigma_log = stderr /
/// estimate) and sets the weight 1/sigma_log^2; points with zero stderr get
/// the largest finite weight in the set (or 1 if all are exact).
///
/// The smallest scale is excluded afterwards if its weighted residual
/// exceeds 3 times the largest among the remaining points.
pub fn fit_power_law(points: &[FitPoint]) -> Result<FitResult> {
    if points.len() < 3 {
        return Err(Error::DegeneratePoints("need at least 3 points".into()));
    }
    if points.iter().any(|p| !(p.estimate > 0.0) || !(p.scale > 0.0) || p.stderr < 0.0) {
        return Err(Error::DegeneratePoints("estimates and scales must be positive".into()));
    }
    let first = points[0].scale;
    if points.iter().all(|p| p.scale == first) {
        return Err(Error::DegeneratePoints("all scales equal".into()));
    }
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.scale.partial_cmp(&b.scale).unwrap());

    let solve = |pts: &[FitPoint]| -> (f64, f64, f64, f64, Vec<f64>) {
        let xs: Vec<f64> = pts.iter().map(|p| p.scale.ln()).collect();
        let ys: Vec<f64> = pts.iter().map(|p| p.estimate.ln()).collect();
        let sig: Vec<f64> = pts.iter().map(|p| p.stderr / p.estimate).collect();
        let max_w = sig
            .iter()
            .filter(|s| **s > 0.0)
            .map(|s| 1.0 / (s * s))
            .fold(0.0f64, f64::max);
        let fallback = if max_w > 0.0 { max_w } else { 1.0 };
        let ws: Vec<f64> =
            sig.iter().map(|s| if *s > 0.0 { 1.0 / (s * s) } else { fallback }).collect();
        let (slope, intercept, stderr, r2) = weighted_fit(&xs, &ys, &ws);
        let resid: Vec<f64> = xs
            .iter()
            .zip(&ys)
            .zip(&ws)
            .map(|((x, y), w)| (y - slope * x - intercept).abs() * w.sqrt())
            .collect();
        (slope, intercept, stderr, r2, resid)
    };

    let mut excluded = Vec::new();
    let mut kept = pts.clone();
    if pts.len() > 3 {
        // judge the smallest scale against the fit through the others
        let (s, i, _, _, resid_rest) = solve(&pts[1..]);
        let rest_max = resid_rest.iter().cloned().fold(0.0f64, f64::max);
        let p0 = &pts[0];
        let sig0 = if p0.stderr > 0.0 { p0.stderr / p0.estimate } else { 1.0 };
        let resid0 = (p0.estimate.ln() - s * p0.scale.ln() - i).abs() / sig0;
        // residuals are in sigma units, so a perfect remainder fit still
        // leaves a 3 sigma floor for the exclusion threshold
        if resid0 > 3.0 * rest_max.max(1.0) {
            excluded.push(p0.scale);
            kept.remove(0);
        }
    }
    let (slope, intercept, stderr, r2, _) = solve(&kept);
    Ok(FitResult { slope, intercept, stderr, points: kept, r_squared: r2, excluded_scales: excluded })
}

use crate::error::{Error, Result};
use crate::montecarlo::OutageEstimate;
use serde::{Deserialize, Serialize};

/// Minimum coefficient of determination for a window to count as a straight
/// line on the log-log plot.
const MIN_R2: f64 = 0.999;
const MIN_WINDOW: usize = 4;
/// Tail slopes below this are read as an outage floor.
const FLOOR_SLOPE: f64 = 0.1;

/// High-power slope of `−log₁₀ P_out` against `log₁₀ P`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiversityFit {
    pub slope: f64,
    /// Standard error of the least-squares slope.
    pub stderr: f64,
    pub points_used: usize,
    pub floor_detected: bool,
}

struct Line {
    slope: f64,
    stderr: f64,
    r2: f64,
}

fn least_squares(x: &[f64], y: &[f64]) -> Line {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    let slope = sxy / sxx;
    let ss_res = (syy - slope * sxy).max(0.0);
    // A flat run has no variance to explain; treat it as a perfect line.
    let r2 = if syy <= 1e-24 * n { 1.0 } else { 1.0 - ss_res / syy };
    let stderr = if x.len() > 2 {
        (ss_res / (n - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Line { slope, stderr, r2 }
}

/// Fits the diversity order to `(P, P_out)` pairs with `P` in linear units.
///
/// The fit uses the longest trailing run of at least four points that is
/// straight on the log-log scale (`R² ≥ 0.999`), falling back to the last
/// four. A floor is reported when the last four points rise by less than
/// 0.1 decade per decade.
pub fn diversity_fit(points: &[(f64, f64)]) -> Result<DiversityFit> {
    if points.len() < MIN_WINDOW {
        return Err(Error::InvalidInput(format!(
            "diversity fit needs at least {MIN_WINDOW} points, got {}",
            points.len()
        )));
    }
    for (i, &(p, out)) in points.iter().enumerate() {
        if !(p > 0.0 && p.is_finite()) {
            return Err(Error::InvalidInput(format!("power must be positive, got {p}")));
        }
        if i > 0 && p <= points[i - 1].0 {
            return Err(Error::InvalidInput("powers must be strictly increasing".into()));
        }
        if !(out > 0.0 && out <= 1.0) {
            return Err(Error::InvalidInput(format!(
                "outage must lie in (0, 1] for a log-log fit, got {out} at P = {p}"
            )));
        }
    }
    let x: Vec<f64> = points.iter().map(|p| p.0.log10()).collect();
    let y: Vec<f64> = points.iter().map(|p| -p.1.log10()).collect();
    let n = points.len();
    let tail = least_squares(&x[n - MIN_WINDOW..], &y[n - MIN_WINDOW..]);
    let start = (0..=n - MIN_WINDOW)
        .find(|&s| least_squares(&x[s..], &y[s..]).r2 >= MIN_R2)
        .unwrap_or(n - MIN_WINDOW);
    let fit = least_squares(&x[start..], &y[start..]);
    Ok(DiversityFit {
        slope: fit.slope,
        stderr: fit.stderr,
        points_used: n - start,
        floor_detected: tail.slope < FLOOR_SLOPE,
    })
}

/// Turns simulated outages into fit points, keeping only estimates with at
/// least 100 outage events; the slope of pure noise means nothing.
pub fn mc_fit_points(powers: &[f64], estimates: &[OutageEstimate]) -> Result<Vec<(f64, f64)>> {
    let kept: Vec<(f64, f64)> = powers
        .iter()
        .zip(estimates)
        .filter(|(_, e)| e.p_hat * e.trials as f64 >= 100.0)
        .map(|(&p, e)| (p, e.p_hat))
        .collect();
    if kept.len() < MIN_WINDOW {
        return Err(Error::InvalidInput(format!(
            "only {} points have at least 100 outage events; raise the trial count or lower the power range",
            kept.len()
        )));
    }
    Ok(kept)
}

use serde::{Deserialize, Serialize};

use super::TheoryError;
use crate::dist::CumulantSummary;

/// Smallest depth included in a fit.
pub const MIN_FIT_DEPTH: usize = 2;
/// A trace must reach at least this depth.
pub const MIN_MAX_DEPTH: usize = 8;
/// Below this |κ̂3| everywhere the skewness fit is skipped.
pub const SKEW_FLOOR: f64 = 0.01;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    /// Slope of `ln|κ̂3|` against `ln d`; `None` when skewness is negligible.
    pub kappa3_slope: Option<f64>,
    /// Slope of `ln D_KL` against `ln d`; `None` when fewer than two depths
    /// have positive divergence.
    pub kl_slope: Option<f64>,
    pub depths: Vec<usize>,
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0 && y.is_finite())
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    Some(sxy / sxx)
}

/// Fits the decay of skewness and KL divergence with depth from a prior.
/// `trace[i] = (depth, summary)`; depths below 2 are ignored.
pub fn decay_rate_fit(trace: &[(usize, CumulantSummary)]) -> Result<DecayFit, TheoryError> {
    let d_max = trace.iter().map(|(d, _)| *d).max().unwrap_or(0);
    if d_max < MIN_MAX_DEPTH {
        return Err(TheoryError::InsufficientDepth { d_max });
    }
    let used: Vec<&(usize, CumulantSummary)> = trace.iter().filter(|(d, _)| *d >= MIN_FIT_DEPTH).collect();
    let depths = used.iter().map(|(d, _)| *d).collect();
    let skewed = used.iter().any(|(_, s)| s.skew.abs() >= SKEW_FLOOR);
    let kappa3_slope = if skewed {
        loglog_slope(&used.iter().map(|(d, s)| (*d as f64, s.skew.abs())).collect::<Vec<_>>())
    } else {
        None
    };
    let kl_slope = loglog_slope(&used.iter().map(|(d, s)| (*d as f64, s.kl_gauss)).collect::<Vec<_>>());
    Ok(DecayFit {
        kappa3_slope,
        kl_slope,
        depths,
    })
}

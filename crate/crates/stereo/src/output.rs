//! Report files: disparity PGM, per-pixel CSV, MSE trace CSV and JSON summary.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use crate::config::StereoConfig;
use crate::image::{write_atomic, write_pgm, Raster};
use crate::run::StereoReport;
use crate::StereoError;

/// Disparities mapped linearly from `[0, max_disparity]` to `[0, 255]`;
/// non-finite values become 0.
pub fn disparity_raster(
    width: usize,
    height: usize,
    disparity: &[f64],
    max_disparity: f64,
) -> Result<Raster, StereoError> {
    let scale = if max_disparity > 0.0 {
        255.0 / max_disparity
    } else {
        0.0
    };
    let px = disparity
        .iter()
        .map(|d| {
            if d.is_finite() {
                (d * scale).round().clamp(0.0, 255.0) as u8
            } else {
                0
            }
        })
        .collect();
    Raster::new(width, height, px)
}

pub fn write_disparity_pgm(
    report: &StereoReport,
    max_disparity: f64,
    path: impl AsRef<Path>,
) -> Result<(), StereoError> {
    write_pgm(
        &disparity_raster(report.width, report.height, &report.disparity, max_disparity)?,
        path,
    )
}

fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x}")
    } else {
        "NaN".into()
    }
}

/// Columns `u,v,disparity,D_KL,eps`. KL and eps are NaN for GBP reports.
pub fn pixel_csv(report: &StereoReport) -> String {
    let mut s = String::from("u,v,disparity,D_KL,eps\n");
    for (i, d) in report.disparity.iter().enumerate() {
        let kl = report.kl.as_ref().map_or(f64::NAN, |k| k[i]);
        let eps = report.eps.as_ref().map_or(f64::NAN, |e| e[i]);
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            i % report.width,
            i / report.width,
            num(*d),
            num(kl),
            num(eps)
        );
    }
    s
}

pub fn write_pixel_csv(report: &StereoReport, path: impl AsRef<Path>) -> Result<(), StereoError> {
    write_atomic(path.as_ref(), pixel_csv(report).as_bytes())
}

/// Columns `iteration,mse_<engine>...`, one row per `t = 0..=iterations`.
pub fn mse_trace_csv(reports: &[&StereoReport]) -> String {
    let mut s = String::from("iteration");
    for r in reports {
        let _ = write!(s, ",mse_{}", r.engine.name());
    }
    s.push('\n');
    let rows = reports.iter().map(|r| r.mse_trace.len()).max().unwrap_or(0);
    for t in 0..rows {
        let _ = write!(s, "{t}");
        for r in reports {
            let _ = write!(s, ",{}", num(r.mse_trace.get(t).copied().unwrap_or(f64::NAN)));
        }
        s.push('\n');
    }
    s
}

#[derive(Serialize)]
struct Summary<'a> {
    engine: &'a str,
    width: usize,
    height: usize,
    iterations: usize,
    mse: Option<f64>,
    final_change: f64,
    n_smoothing_factors: usize,
    /// `[top prior-variance quartile, bottom quartile]` fraction with KL < 0.02.
    kl_below_002_by_prior_quartile: Option<[f64; 2]>,
    config: &'a StereoConfig,
}

pub fn summary_json(report: &StereoReport, cfg: &StereoConfig) -> Result<String, StereoError> {
    let s = Summary {
        engine: report.engine.name(),
        width: report.width,
        height: report.height,
        iterations: report.iterations,
        mse: report.mse,
        final_change: report.final_change,
        n_smoothing_factors: report.n_smoothing_factors,
        kl_below_002_by_prior_quartile: report.kl_quartile_fractions(0.02).map(|(a, b)| [a, b]),
        config: cfg,
    };
    Ok(serde_json::to_string_pretty(&s)? + "\n")
}

pub fn write_summary_json(
    report: &StereoReport,
    cfg: &StereoConfig,
    path: impl AsRef<Path>,
) -> Result<(), StereoError> {
    write_atomic(path.as_ref(), summary_json(report, cfg)?.as_bytes())
}

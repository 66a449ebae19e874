use bpclt_core::bp::{run_sync_observed, BpOptions};
use bpclt_core::dist::{cumulants, DiscreteDist};
use bpclt_core::gbp::{gbp_run_observed, GbpOptions};
use serde::{Deserialize, Serialize};

use crate::config::StereoConfig;
use crate::graph::build_with_priors;
use crate::image::{DisparityMap, ImagePair};
use crate::prior::matching_cost_priors;
use crate::StereoError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    Bp,
    Gbp,
}

impl Engine {
    pub fn name(self) -> &'static str {
        match self {
            Engine::Bp => "bp",
            Engine::Gbp => "gbp",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StereoReport {
    pub engine: Engine,
    pub width: usize,
    pub height: usize,
    pub iterations: usize,
    /// Belief means, row-major.
    pub disparity: Vec<f64>,
    /// Per-pixel KL divergence to the Gaussian fit (BP only); NaN for point
    /// masses.
    pub kl: Option<Vec<f64>>,
    /// Per-pixel max |standardized cumulant| of orders 3..6 (BP only).
    pub eps: Option<Vec<f64>>,
    /// Variance of each pixel's matching-cost prior.
    pub prior_var: Vec<f64>,
    /// Final MSE against known ground-truth pixels.
    pub mse: Option<f64>,
    /// MSE after each iteration `t = 0..=iterations`; empty without ground truth.
    pub mse_trace: Vec<f64>,
    /// Largest change of any belief mean in the last iteration.
    pub final_change: f64,
    pub n_smoothing_factors: usize,
}

impl StereoReport {
    /// Fraction of pixels with KL below `tol` among those whose prior
    /// variance is at or above the upper quartile, and at or below the lower
    /// quartile. NaN KL counts as not below.
    pub fn kl_quartile_fractions(&self, tol: f64) -> Option<(f64, f64)> {
        let kl = self.kl.as_ref()?;
        let mut sorted = self.prior_var.clone();
        sorted.sort_by(f64::total_cmp);
        let (q1, q3) = (quantile(&sorted, 0.25), quantile(&sorted, 0.75));
        let frac = |keep: &dyn Fn(f64) -> bool| {
            let sel: Vec<f64> = kl
                .iter()
                .zip(&self.prior_var)
                .filter(|(_, pv)| keep(**pv))
                .map(|(k, _)| *k)
                .collect();
            sel.iter().filter(|k| **k < tol).count() as f64 / sel.len().max(1) as f64
        };
        Some((frac(&|pv| pv >= q3), frac(&|pv| pv <= q1)))
    }

    pub fn as_map(&self) -> DisparityMap {
        DisparityMap::new(self.width, self.height, self.disparity.clone()).expect("report shape")
    }
}

/// Linear-interpolated quantile of sorted data.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

fn mse(estimate: impl Iterator<Item = f64>, truth: &DisparityMap) -> f64 {
    let (mut s, mut n) = (0.0, 0usize);
    for (e, t) in estimate.zip(truth.values()) {
        if t.is_finite() {
            s += (e - t).powi(2);
            n += 1;
        }
    }
    if n == 0 {
        f64::NAN
    } else {
        s / n as f64
    }
}

/// Builds the stereo graph and runs `engine` for `cfg.iterations`
/// synchronous iterations.
pub fn run_stereo(pair: &ImagePair, cfg: &StereoConfig, engine: Engine) -> Result<StereoReport, StereoError> {
    let priors = matching_cost_priors(pair, cfg)?;
    run_with_priors(pair, cfg, engine, priors)
}

/// BP and GBP on the same graph, sharing the prior computation.
pub fn run_both(pair: &ImagePair, cfg: &StereoConfig) -> Result<(StereoReport, StereoReport), StereoError> {
    let priors = matching_cost_priors(pair, cfg)?;
    let bp = run_with_priors(pair, cfg, Engine::Bp, priors.clone())?;
    let gbp = run_with_priors(pair, cfg, Engine::Gbp, priors)?;
    Ok((bp, gbp))
}

fn run_with_priors(
    pair: &ImagePair,
    cfg: &StereoConfig,
    engine: Engine,
    priors: Vec<DiscreteDist>,
) -> Result<StereoReport, StereoError> {
    let prior_var: Vec<f64> = priors.iter().map(DiscreteDist::variance).collect();
    let graph = build_with_priors(pair, cfg, priors)?;
    let truth = pair.ground_truth.as_ref();
    let mut mse_trace = Vec::new();
    let mut last_means: Vec<f64> = Vec::new();
    let mut final_change = 0.0;
    let mut track = |means: Vec<f64>| {
        if let Some(t) = truth {
            mse_trace.push(mse(means.iter().copied(), t));
        }
        if !last_means.is_empty() {
            final_change = means
                .iter()
                .zip(&last_means)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
        }
        last_means = means;
    };
    let (disparity, kl, eps) = match engine {
        Engine::Bp => {
            let opts = BpOptions::new(cfg.iterations).with_parallel(cfg.parallel);
            let run = run_sync_observed(&graph, opts, |_, b| track(b.iter().map(DiscreteDist::mean).collect()))?;
            let stats: Vec<(f64, f64)> = run
                .beliefs
                .iter()
                .map(|b| cumulants(b).map_or((f64::NAN, f64::NAN), |s| (s.kl_gauss, s.eps)))
                .collect();
            let disparity: Vec<f64> = run.beliefs.iter().map(DiscreteDist::mean).collect();
            (
                disparity,
                Some(stats.iter().map(|s| s.0).collect()),
                Some(stats.iter().map(|s| s.1).collect()),
            )
        }
        Engine::Gbp => {
            let opts = GbpOptions::new(cfg.iterations)
                .with_parallel(cfg.parallel)
                .with_projection(cfg.gbp_projection);
            let run = gbp_run_observed(&graph, opts, |_, b| track(b.iter().map(|g| g.mean()).collect()))?;
            (run.beliefs.iter().map(|g| g.mean()).collect(), None, None)
        }
    };
    let mse = truth
        .map(|t| mse(disparity.iter().copied(), t))
        .filter(|m| m.is_finite());
    if mse.is_none() {
        mse_trace.clear();
    }
    Ok(StereoReport {
        engine,
        width: pair.width(),
        height: pair.height(),
        iterations: cfg.iterations,
        disparity,
        kl,
        eps,
        prior_var,
        mse,
        mse_trace,
        final_change,
        n_smoothing_factors: graph.n_binary(),
    })
}

/// `Z = f B / d`.
pub fn disparity_to_depth(d: f64, focal: f64, baseline: f64) -> Result<f64, StereoError> {
    if !(d > 0.0) {
        return Err(StereoError::ZeroDisparity(d));
    }
    Ok(focal * baseline / d)
}

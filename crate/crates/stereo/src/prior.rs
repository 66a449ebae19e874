use bpclt_core::dist::DiscreteDist;
use rayon::prelude::*;

use crate::config::{CostFunction, StereoConfig};
use crate::image::ImagePair;
use crate::StereoError;

/// Patch cost between left `(u, v)` and right `(u - d, v)` for every
/// disparity bin. Samples outside the image are clamped to the border and
/// fractional disparities interpolate the right image along the row.
pub fn matching_costs(pair: &ImagePair, u: usize, v: usize, cfg: &StereoConfig) -> Vec<f64> {
    let r = (cfg.patch_size / 2) as i64;
    let (u, v) = (u as i64, v as i64);
    cfg.disparity_grid
        .centers()
        .map(|d| {
            let mut c = 0.0;
            for dy in -r..=r {
                for dx in -r..=r {
                    let l = pair.left.clamped(u + dx, v + dy);
                    let rr = pair.right.sample_row(
                        ((u + dx) as f64 - d).max(0.0),
                        (v + dy).clamp(0, pair.height() as i64 - 1),
                    );
                    let diff = l - rr;
                    c += match cfg.cost {
                        CostFunction::Sad => diff.abs(),
                        CostFunction::Ssd => diff * diff,
                    };
                }
            }
            c
        })
        .collect()
}

/// `exp(-lambda * (c(d) - min c))`, normalized on the disparity grid.
pub fn matching_cost_prior(
    pair: &ImagePair,
    pixel: (usize, usize),
    cfg: &StereoConfig,
) -> Result<DiscreteDist, StereoError> {
    let costs = matching_costs(pair, pixel.0, pixel.1, cfg);
    let min = costs.iter().copied().fold(f64::INFINITY, f64::min);
    let mass = costs.iter().map(|c| (-cfg.lambda * (c - min)).exp()).collect();
    Ok(DiscreteDist::from_weights(cfg.disparity_grid, mass)?)
}

/// Priors for every pixel in row-major order.
pub fn matching_cost_priors(pair: &ImagePair, cfg: &StereoConfig) -> Result<Vec<DiscreteDist>, StereoError> {
    let w = pair.width();
    (0..pair.width() * pair.height())
        .into_par_iter()
        .map(|i| matching_cost_prior(pair, (i % w, i / w), cfg))
        .collect()
}

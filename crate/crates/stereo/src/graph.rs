use bpclt_core::dist::DiscreteDist;
use bpclt_core::graph::{build_grid_graph, EdgeMask, FactorGraph};

use crate::config::StereoConfig;
use crate::image::{ImagePair, Raster};
use crate::prior::matching_cost_priors;
use crate::StereoError;

/// 4-neighbour pairs whose intensity difference exceeds `cut`. Variables are
/// numbered row-major, `v * width + u`.
pub fn edge_mask(image: &Raster, cut: f64) -> EdgeMask {
    let (w, h) = (image.width(), image.height());
    let mut mask = EdgeMask::new();
    let step = |a: (usize, usize), b: (usize, usize)| (image.get(a.0, a.1) as f64 - image.get(b.0, b.1) as f64).abs();
    for v in 0..h {
        for u in 0..w {
            if u + 1 < w && step((u, v), (u + 1, v)) > cut {
                mask.insert(v * w + u, v * w + u + 1);
            }
            if v + 1 < h && step((u, v), (u, v + 1)) > cut {
                mask.insert(v * w + u, (v + 1) * w + u);
            }
        }
    }
    mask
}

/// One variable per pixel with its matching-cost prior, smoothing factors on
/// unmasked 4-neighbour pairs.
pub fn build_stereo_graph(pair: &ImagePair, cfg: &StereoConfig) -> Result<FactorGraph, StereoError> {
    let priors = matching_cost_priors(pair, cfg)?;
    build_with_priors(pair, cfg, priors)
}

pub(crate) fn build_with_priors(
    pair: &ImagePair,
    cfg: &StereoConfig,
    priors: Vec<DiscreteDist>,
) -> Result<FactorGraph, StereoError> {
    cfg.validate()?;
    let mask = edge_mask(&pair.left, cfg.edge_cut());
    Ok(build_grid_graph(
        pair.height(),
        pair.width(),
        priors.into_iter().enumerate().collect(),
        &cfg.smoothing_kernel,
        cfg.disparity_grid,
        Some(&mask),
    )?)
}

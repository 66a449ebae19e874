//! Stereo disparity with BP and GBP on the same matching-cost graph.

use std::path::PathBuf;

use bpclt_stereo::image::pgm_bytes;
use bpclt_stereo::output::{disparity_raster, pixel_csv, summary_json};
use bpclt_stereo::run::run_both;
use bpclt_stereo::{load_middlebury, ImagePair, StereoReport, SyntheticScene};
use serde_json::json;

use super::SeedOutput;
use crate::config::{StereoParams, StereoSource};
use crate::table::Table;
use crate::{RunError, SeedContext};

pub fn load_pair(p: &StereoParams, seed: u64, full_scale: bool) -> Result<ImagePair, RunError> {
    let [h, w] = if full_scale { p.full_scale_size } else { p.size };
    match &p.source {
        StereoSource::Synthetic => Ok(SyntheticScene::with_size(h, w, seed).render()),
        StereoSource::Middlebury { dir, gt_scale } => load_middlebury(dir, *gt_scale)
            .and_then(|pair| pair.fit_within(h, w))
            .seed(seed),
    }
}

fn engine_extra(r: &StereoReport) -> serde_json::Value {
    json!({
        "mse": r.mse,
        "final_change": r.final_change,
        "n_smoothing_factors": r.n_smoothing_factors,
        "kl_below_002_by_prior_quartile": r.kl_quartile_fractions(0.02).map(|(a, b)| [a, b]),
    })
}

/// `seed_<s>.csv` is the MSE trace `iteration,mse_bp,mse_gbp`; the seed
/// directory holds per-pixel CSVs, disparity PGMs and JSON summaries.
pub fn run(p: &StereoParams, seed: u64, full_scale: bool) -> Result<SeedOutput, RunError> {
    let pair = load_pair(p, seed, full_scale)?;
    let mut cfg = p.stereo.clone();
    cfg.seed = seed;
    if full_scale {
        cfg.iterations = p.full_scale_iterations;
    }
    let (bp, gbp) = run_both(&pair, &cfg).seed(seed)?;
    let mut table = Table::new(&["iteration"], &["mse_bp", "mse_gbp"]);
    for (t, (a, b)) in bp.mse_trace.iter().zip(&gbp.mse_trace).enumerate() {
        table.push(vec![t.to_string()], vec![*a, *b]);
    }
    let max_d = cfg.disparity_grid.max();
    let mut files = Vec::new();
    for r in [&bp, &gbp] {
        let name = r.engine.name();
        files.push((PathBuf::from(format!("{name}_pixels.csv")), pixel_csv(r).into_bytes()));
        let raster = disparity_raster(r.width, r.height, &r.disparity, max_d).seed(seed)?;
        files.push((PathBuf::from(format!("{name}_disparity.pgm")), pgm_bytes(&raster)));
        files.push((
            PathBuf::from(format!("{name}_summary.json")),
            summary_json(r, &cfg).seed(seed)?.into_bytes(),
        ));
    }
    if let Some(gt) = &pair.ground_truth {
        let raster = disparity_raster(gt.width(), gt.height(), gt.values(), max_d).seed(seed)?;
        files.push((PathBuf::from("ground_truth.pgm"), pgm_bytes(&raster)));
    }
    let ratio = match (bp.mse, gbp.mse) {
        (Some(a), Some(b)) if a > 0.0 => Some((a - b).abs() / a),
        _ => None,
    };
    Ok(SeedOutput {
        seed,
        summary: table.clone(),
        csv: table,
        extra: json!({
            "height": pair.height(),
            "width": pair.width(),
            "iterations": cfg.iterations,
            "bp": engine_extra(&bp),
            "gbp": engine_extra(&gbp),
            "mse_relative_difference": ratio,
        }),
        files,
    })
}

use bpclt_core::dist::Grid;
use bpclt_core::gbp::Projection;
use bpclt_core::graph::KernelSpec;
use serde::{Deserialize, Serialize};

use crate::StereoError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CostFunction {
    /// Sum of absolute differences.
    #[default]
    Sad,
    /// Sum of squared differences.
    Ssd,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StereoConfig {
    /// Side of the square matching patch, odd.
    pub patch_size: usize,
    /// Prior mass is `exp(-lambda * (c - c_min))`.
    pub lambda: f64,
    pub cost: CostFunction,
    /// Neighbours whose left-image intensities differ by more than
    /// `edge_threshold * edge_scale` are not smoothed together.
    pub edge_threshold: f64,
    pub edge_scale: f64,
    /// Disparity values in pixels.
    pub disparity_grid: Grid,
    /// Kernel over disparity-difference bins.
    pub smoothing_kernel: KernelSpec,
    pub iterations: usize,
    pub seed: u64,
    /// How GBP turns each matching-cost prior into a Gaussian.
    pub gbp_projection: Projection,
    pub parallel: bool,
}

impl Default for StereoConfig {
    fn default() -> Self {
        StereoConfig {
            patch_size: 5,
            lambda: 0.002,
            cost: CostFunction::Sad,
            edge_threshold: 3.0,
            edge_scale: 1.0,
            disparity_grid: Grid::unit(16).expect("static grid"),
            smoothing_kernel: KernelSpec::Gaussian {
                sigma_bins: 1.0,
                truncate_sigmas: 4.0,
            },
            iterations: 400,
            seed: 42,
            gbp_projection: Projection::Mode,
            parallel: true,
        }
    }
}

impl StereoConfig {
    /// Every problem with the config as `(field, message)`.
    pub fn issues(&self) -> Vec<(&'static str, String)> {
        let mut out = Vec::new();
        if self.patch_size == 0 || self.patch_size.is_multiple_of(2) {
            out.push(("patch_size", format!("must be odd and >= 1, got {}", self.patch_size)));
        }
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            out.push(("lambda", format!("must be > 0, got {}", self.lambda)));
        }
        if !(self.edge_threshold >= 0.0) {
            out.push(("edge_threshold", format!("must be >= 0, got {}", self.edge_threshold)));
        }
        if !(self.edge_scale >= 0.0) {
            out.push(("edge_scale", format!("must be >= 0, got {}", self.edge_scale)));
        }
        if self.iterations < 1 {
            out.push(("iterations", "must be >= 1".into()));
        }
        if self.disparity_grid.min() < 0.0 {
            out.push((
                "disparity_grid",
                format!("starts below zero at {}", self.disparity_grid.min()),
            ));
        }
        if let KernelSpec::RandomNoise { .. } = self.smoothing_kernel {
            out.push((
                "smoothing_kernel",
                "must be deterministic (gaussian, gamma_shaped or fixed)".into(),
            ));
        }
        out
    }

    pub fn validate(&self) -> Result<(), StereoError> {
        match self.issues().first() {
            None => Ok(()),
            Some((field, msg)) => Err(StereoError::InvalidConfig(format!("{field} {msg}"))),
        }
    }

    pub fn edge_cut(&self) -> f64 {
        self.edge_threshold * self.edge_scale
    }
}

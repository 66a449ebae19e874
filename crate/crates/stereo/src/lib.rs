//! Stereo disparity estimation with discretized and Gaussian belief
//! propagation.
//!
//! Every pixel of the left image is a variable on a disparity grid. Its unary
//! factor comes from patch matching costs against the right image, and
//! neighbouring pixels are tied by a zero-mean smoothing kernel unless the
//! intensity step between them exceeds the edge threshold.

// negated float comparisons are how NaN inputs get rejected
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod graph;
pub mod image;
pub mod middlebury;
pub mod output;
pub mod prior;
pub mod run;
pub mod synthetic;

use std::path::PathBuf;

use bpclt_core::bp::BpError;
use bpclt_core::dist::DistError;
use bpclt_core::gbp::GbpError;
use bpclt_core::graph::GraphError;
use thiserror::Error;

pub use config::{CostFunction, StereoConfig};
pub use graph::{build_stereo_graph, edge_mask};
pub use image::{load_disparity, load_image, DisparityMap, ImagePair, Raster};
pub use middlebury::load_middlebury;
pub use prior::{matching_cost_prior, matching_cost_priors};
pub use run::{disparity_to_depth, run_stereo, Engine, StereoReport};
pub use synthetic::{shifted_pair, SyntheticScene};

#[derive(Debug, Error)]
pub enum StereoError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot decode {path}: {msg}")]
    Decode { path: PathBuf, msg: String },
    #[error("dimension mismatch: {what} is {got:?}, expected {expected:?}")]
    DimensionMismatch {
        what: &'static str,
        expected: (usize, usize),
        got: (usize, usize),
    },
    #[error("disparity must be positive, got {0}")]
    ZeroDisparity(f64),
    #[error("invalid stereo config: {0}")]
    InvalidConfig(String),
    #[error("no recognised stereo layout in {0}")]
    Layout(PathBuf),
    #[error(transparent)]
    Bp(#[from] BpError),
    #[error(transparent)]
    Gbp(#[from] GbpError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Dist(#[from] DistError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

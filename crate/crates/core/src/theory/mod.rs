//! Numerical checks of the anchoring, contraction, decay-rate and
//! computation-tree results.

mod anchor;
mod contraction;
mod rate;
mod unwrap;

pub use anchor::{critical_threshold, solve_steady_state, strong_prior_lhs_rhs, AnchorAnalysis, CriticalThreshold};
pub use contraction::{predict_product_cumulants, ContractionPrediction};
pub use rate::{decay_rate_fit, loglog_slope, DecayFit, MIN_MAX_DEPTH};
pub use unwrap::{check_tree_equivalence, unwrap_computation_tree, UnwrappedTree, MAX_TREE_NODES};

use thiserror::Error;

use crate::bp::BpError;
use crate::dist::DistError;
use crate::graph::GraphError;

#[derive(Debug, Error)]
pub enum TheoryError {
    #[error("trace reaches depth {d_max}; at least 8 is needed for a rate fit")]
    InsufficientDepth { d_max: usize },
    #[error("computation tree would exceed {limit} nodes")]
    TreeTooLarge { limit: usize },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Bp(#[from] BpError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Dist(#[from] DistError),
}

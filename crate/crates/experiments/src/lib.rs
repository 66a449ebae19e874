//! Seeded experiment runner behind the `bpclt` command-line tool.
//!
//! A JSON config names an experiment kind, its parameters and an inclusive
//! seed range. [`run_config`] runs every seed, writes one CSV per seed, a
//! seed-aggregated CSV and a JSON manifest.

// negated float comparisons are how NaN inputs get rejected
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod experiments;
pub mod runner;
pub mod table;
pub mod validate;

use std::path::PathBuf;

use thiserror::Error;

pub use config::{load_config, parse_config, ExperimentConfig, Issue};
pub use runner::{run_config, RunOptions, RunSummary};
pub use table::Table;

#[derive(Debug, Error)]
pub enum RunError {
    #[error("seed {seed}: {source}")]
    Bp { seed: u64, source: bpclt_core::bp::BpError },
    #[error("seed {seed}: {source}")]
    Gbp {
        seed: u64,
        source: bpclt_core::gbp::GbpError,
    },
    #[error("seed {seed}: {source}")]
    Graph { seed: u64, source: bpclt_core::GraphError },
    #[error("seed {seed}: {source}")]
    Dist { seed: u64, source: bpclt_core::DistError },
    #[error("seed {seed}: {source}")]
    Theory {
        seed: u64,
        source: bpclt_core::theory::TheoryError,
    },
    #[error("seed {seed}: {source}")]
    Stereo {
        seed: u64,
        source: bpclt_stereo::StereoError,
    },
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("cannot build thread pool: {0}")]
    Pool(String),
}

/// Attaches a seed to the error types the experiments produce.
pub(crate) trait SeedContext<T> {
    fn seed(self, seed: u64) -> Result<T, RunError>;
}

macro_rules! seed_context {
    ($ty:ty, $variant:ident) => {
        impl<T> SeedContext<T> for Result<T, $ty> {
            fn seed(self, seed: u64) -> Result<T, RunError> {
                self.map_err(|source| RunError::$variant { seed, source })
            }
        }
    };
}

seed_context!(bpclt_core::bp::BpError, Bp);
seed_context!(bpclt_core::gbp::GbpError, Gbp);
seed_context!(bpclt_core::GraphError, Graph);
seed_context!(bpclt_core::DistError, Dist);
seed_context!(bpclt_core::theory::TheoryError, Theory);
seed_context!(bpclt_stereo::StereoError, Stereo);

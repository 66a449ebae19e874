//! One module per experiment family. Every runner maps `(params, seed)` to a
//! [`SeedOutput`].

pub mod equivalence;
pub mod rate;
pub mod stereo;
pub mod sweeps;
pub mod topology;

use std::path::PathBuf;

use bpclt_core::dist::{cumulants, CumulantSummary, DiscreteDist};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::Experiment;
use crate::table::Table;
use crate::RunError;

/// Everything one seed produces.
#[derive(Debug, Clone)]
pub struct SeedOutput {
    pub seed: u64,
    /// Written as `seed_<s>.csv`.
    pub csv: Table,
    /// Row-aligned across seeds; averaged into `aggregate.csv`.
    pub summary: Table,
    /// Per-seed entry of the manifest.
    pub extra: serde_json::Value,
    /// Extra artifacts, relative to `seed_<s>/`.
    pub files: Vec<(PathBuf, Vec<u8>)>,
}

impl SeedOutput {
    pub(crate) fn plain(seed: u64, table: Table, extra: serde_json::Value) -> Self {
        SeedOutput {
            seed,
            summary: table.clone(),
            csv: table,
            extra,
            files: Vec::new(),
        }
    }
}

/// Prior draws use stream 1 of the run seed; random kernels use stream 0.
pub fn prior_rng(seed: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    rng
}

/// Cumulant summary or a row of NaN for degenerate beliefs.
pub(crate) fn summary_or_nan(d: &DiscreteDist) -> CumulantSummary {
    cumulants(d).unwrap_or(CumulantSummary {
        mu: d.mean(),
        var: d.variance(),
        skew: f64::NAN,
        exkurt: f64::NAN,
        std5: f64::NAN,
        std6: f64::NAN,
        eps: f64::NAN,
        kl_gauss: f64::NAN,
    })
}

pub fn run_seed(exp: &Experiment, seed: u64, full_scale: bool) -> Result<SeedOutput, RunError> {
    match exp {
        Experiment::Chain(_) | Experiment::Tree(_) | Experiment::Star(_) | Experiment::Grid(_) => {
            topology::run(exp, seed)
        }
        Experiment::PriorSweep(p) => sweeps::prior_sweep(p, seed),
        Experiment::DegreeSweep(p) => sweeps::degree_sweep(p, seed),
        Experiment::ConvergenceRate(p) => rate::run(p, seed),
        Experiment::TreeEquivalence(p) => equivalence::run(p, seed),
        Experiment::Stereo(p) => stereo::run(p, seed, full_scale),
    }
}

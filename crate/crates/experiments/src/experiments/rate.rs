//! Decay of skewness and KL divergence with depth along a chain fed by one
//! prior at variable 0.

use bpclt_core::bp::run_tree_exact;
use bpclt_core::theory::decay_rate_fit;
use serde_json::json;

use super::topology::chain;
use super::{summary_or_nan, SeedOutput};
use crate::config::RateParams;
use crate::table::Table;
use crate::{RunError, SeedContext};

pub fn run(p: &RateParams, seed: u64) -> Result<SeedOutput, RunError> {
    let graph = chain(p.max_depth + 1, &[0], p.grid, &p.kernel, &p.prior, seed)?;
    let beliefs = run_tree_exact(&graph).seed(seed)?;
    let mut table = Table::new(&["depth"], &["abs_skew", "exkurt", "eps", "kl_gauss", "var"]);
    let mut trace = Vec::new();
    for (d, b) in beliefs.iter().enumerate() {
        let s = summary_or_nan(b);
        table.push(
            vec![d.to_string()],
            vec![s.skew.abs(), s.exkurt, s.eps, s.kl_gauss, s.var],
        );
        if s.kl_gauss.is_finite() {
            trace.push((d, s));
        }
    }
    let fit = decay_rate_fit(&trace).seed(seed)?;
    Ok(SeedOutput::plain(seed, table, json!({ "fit": fit })))
}

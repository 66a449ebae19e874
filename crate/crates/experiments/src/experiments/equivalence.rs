//! Loopy synchronous BP against BP on the unwrapped computation tree.

use bpclt_core::theory::{check_tree_equivalence, unwrap_computation_tree};
use serde_json::json;

use super::topology::build_topology;
use super::SeedOutput;
use crate::config::{EquivalenceParams, Experiment};
use crate::table::Table;
use crate::{RunError, SeedContext};

/// One row per `(root, iterations)` with the L∞ gap between the root
/// beliefs.
pub fn run(p: &EquivalenceParams, seed: u64) -> Result<SeedOutput, RunError> {
    let graph = build_topology(&Experiment::TreeEquivalence(p.clone()), seed).expect("graph")?;
    let roots = p.roots.clone().unwrap_or_else(|| (0..graph.n_vars()).collect());
    let mut table = Table::new(&["root", "iterations"], &["tree_nodes", "linf"]);
    let mut worst = 0.0f64;
    for root in roots {
        for n in p.iterations.values() {
            let nodes = unwrap_computation_tree(&graph, root, n).seed(seed)?.tree.n_vars();
            let linf = check_tree_equivalence(&graph, root, n).seed(seed)?;
            worst = worst.max(linf);
            table.push(vec![root.to_string(), n.to_string()], vec![nodes as f64, linf]);
        }
    }
    Ok(SeedOutput::plain(seed, table, json!({ "max_linf": worst })))
}

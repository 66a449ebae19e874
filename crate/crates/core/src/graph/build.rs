use std::collections::BTreeSet;

use super::{FactorGraph, FactorKind, GraphError, KernelSpec, VarId};
use crate::dist::{DiscreteDist, Grid};

/// Unordered variable pairs whose binary factor is omitted.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EdgeMask(BTreeSet<(VarId, VarId)>);

impl EdgeMask {
    pub fn new() -> Self {
        EdgeMask::default()
    }

    pub fn insert(&mut self, a: VarId, b: VarId) {
        self.0.insert((a.min(b), a.max(b)));
    }

    pub fn contains(&self, a: VarId, b: VarId) -> bool {
        self.0.contains(&(a.min(b), a.max(b)))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl FromIterator<(VarId, VarId)> for EdgeMask {
    fn from_iter<I: IntoIterator<Item = (VarId, VarId)>>(iter: I) -> Self {
        let mut m = EdgeMask::new();
        for (a, b) in iter {
            m.insert(a, b);
        }
        m
    }
}

fn assemble(
    grid: Grid,
    n_vars: usize,
    pairs: Vec<(VarId, VarId)>,
    priors: Vec<(VarId, DiscreteDist)>,
    kernels: &KernelSpec,
) -> Result<FactorGraph, GraphError> {
    for (v, _) in &priors {
        if *v >= n_vars {
            return Err(GraphError::BadPrior { var: *v, n_vars });
        }
    }
    let ks = kernels.kernels(pairs.len())?;
    let mut factors: Vec<FactorKind> = pairs
        .into_iter()
        .zip(ks)
        .map(|((a, b), kernel)| FactorKind::Binary { a, b, kernel })
        .collect();
    factors.extend(
        priors
            .into_iter()
            .map(|(target, potential)| FactorKind::Unary { target, potential }),
    );
    FactorGraph::new(grid, n_vars, factors)
}

/// `x0 - x1 - ... - x(n-1)`; binary factors in order, then priors.
pub fn build_chain(
    n_vars: usize,
    priors: Vec<(VarId, DiscreteDist)>,
    kernels: &KernelSpec,
    grid: Grid,
) -> Result<FactorGraph, GraphError> {
    if n_vars < 2 {
        return Err(GraphError::Topology(format!(
            "chain needs >= 2 variables, got {n_vars}"
        )));
    }
    let pairs = (0..n_vars - 1).map(|i| (i, i + 1)).collect();
    assemble(grid, n_vars, pairs, priors, kernels)
}

/// Complete `branching`-ary tree of the given depth, numbered breadth first
/// (children of `i` are `i*branching + 1 ..= i*branching + branching`).
/// `leaf_priors` is matched to the leaves in id order.
pub fn build_tree(
    depth: usize,
    branching: usize,
    leaf_priors: Vec<DiscreteDist>,
    kernels: &KernelSpec,
    grid: Grid,
) -> Result<FactorGraph, GraphError> {
    if depth < 1 || branching < 2 {
        return Err(GraphError::Topology(format!(
            "tree needs depth >= 1 and branching >= 2, got {depth}, {branching}"
        )));
    }
    let leaves = branching.pow(depth as u32);
    let n_vars = (branching * leaves - 1) / (branching - 1);
    if leaf_priors.len() != leaves {
        return Err(GraphError::Topology(format!(
            "tree has {leaves} leaves but {} leaf priors were given",
            leaf_priors.len()
        )));
    }
    let pairs = (1..n_vars).map(|c| ((c - 1) / branching, c)).collect();
    let first_leaf = n_vars - leaves;
    let priors = leaf_priors
        .into_iter()
        .enumerate()
        .map(|(i, p)| (first_leaf + i, p))
        .collect();
    assemble(grid, n_vars, pairs, priors, kernels)
}

/// Centre variable 0 joined to outer variables `1..=n_outer`, one prior on
/// each outer variable.
pub fn build_star(
    n_outer: usize,
    outer_priors: Vec<DiscreteDist>,
    kernels: &KernelSpec,
    grid: Grid,
) -> Result<FactorGraph, GraphError> {
    if n_outer < 2 {
        return Err(GraphError::Topology(format!(
            "star needs >= 2 outer variables, got {n_outer}"
        )));
    }
    if outer_priors.len() != n_outer {
        return Err(GraphError::Topology(format!(
            "star has {n_outer} outer variables but {} priors were given",
            outer_priors.len()
        )));
    }
    let pairs = (1..=n_outer).map(|i| (0, i)).collect();
    let priors = outer_priors.into_iter().enumerate().map(|(i, p)| (i + 1, p)).collect();
    assemble(grid, n_outer + 1, pairs, priors, kernels)
}

/// Row-major 4-connected lattice. For each cell the right neighbour's
/// factor precedes the lower neighbour's; masked pairs are skipped.
pub fn build_grid_graph(
    rows: usize,
    cols: usize,
    priors: Vec<(VarId, DiscreteDist)>,
    kernels: &KernelSpec,
    grid: Grid,
    edge_mask: Option<&EdgeMask>,
) -> Result<FactorGraph, GraphError> {
    if rows * cols < 2 {
        return Err(GraphError::Topology(format!(
            "grid needs >= 2 cells, got {rows}x{cols}"
        )));
    }
    let masked = |a: VarId, b: VarId| edge_mask.is_some_and(|m| m.contains(a, b));
    let mut pairs = Vec::with_capacity(2 * rows * cols);
    for r in 0..rows {
        for c in 0..cols {
            let v = r * cols + c;
            if c + 1 < cols && !masked(v, v + 1) {
                pairs.push((v, v + 1));
            }
            if r + 1 < rows && !masked(v, v + cols) {
                pairs.push((v, v + cols));
            }
        }
    }
    assemble(grid, rows * cols, pairs, priors, kernels)
}

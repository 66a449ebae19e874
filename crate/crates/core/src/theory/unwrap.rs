use std::collections::VecDeque;

use super::TheoryError;
use crate::bp::{run_sync, BpOptions};
use crate::graph::{FactorGraph, FactorId, FactorKind, VarId};

/// Upper bound on computation-tree size.
pub const MAX_TREE_NODES: usize = 1_000_000;

#[derive(Debug, Clone)]
pub struct UnwrappedTree {
    pub tree: FactorGraph,
    /// Original variable of every tree node; node 0 is the root.
    pub origin: Vec<VarId>,
    /// Walk length of every tree node.
    pub depth: Vec<usize>,
}

/// Tree of all non-reversing walks of at most `depth` binary factors from
/// `root`. A walk may not leave a variable through the factor it arrived by.
/// Every copy keeps the unary factors of its original variable.
pub fn unwrap_computation_tree(graph: &FactorGraph, root: VarId, depth: usize) -> Result<UnwrappedTree, TheoryError> {
    if root >= graph.n_vars() {
        return Err(TheoryError::InvalidInput(format!(
            "root {root} not in graph of {} variables",
            graph.n_vars()
        )));
    }
    let mut origin = vec![root];
    let mut node_depth = vec![0usize];
    let mut arrived: Vec<Option<FactorId>> = vec![None];
    let mut factors = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    while let Some(node) = queue.pop_front() {
        let u = origin[node];
        for &f in graph.var_factors(u) {
            match &graph.factor(f).kind {
                FactorKind::Unary { potential, .. } => factors.push(FactorKind::Unary {
                    target: node,
                    potential: potential.clone(),
                }),
                FactorKind::Binary { a, b, kernel } => {
                    if node_depth[node] >= depth || arrived[node] == Some(f) {
                        continue;
                    }
                    if origin.len() >= MAX_TREE_NODES {
                        return Err(TheoryError::TreeTooLarge { limit: MAX_TREE_NODES });
                    }
                    let child = origin.len();
                    let (ta, tb) = if *a == u { (node, child) } else { (child, node) };
                    origin.push(if *a == u { *b } else { *a });
                    node_depth.push(node_depth[node] + 1);
                    arrived.push(Some(f));
                    factors.push(FactorKind::Binary {
                        a: ta,
                        b: tb,
                        kernel: kernel.clone(),
                    });
                    queue.push_back(child);
                }
            }
        }
    }
    let tree = FactorGraph::new(graph.grid(), origin.len(), factors)?;
    Ok(UnwrappedTree {
        tree,
        origin,
        depth: node_depth,
    })
}

/// L∞ distance between the root belief after `n_iters` synchronous
/// iterations on `graph` and on its depth-`n_iters` computation tree.
pub fn check_tree_equivalence(graph: &FactorGraph, root: VarId, n_iters: usize) -> Result<f64, TheoryError> {
    if n_iters < 1 {
        return Err(TheoryError::InvalidInput("n_iters must be >= 1".into()));
    }
    let loopy = run_sync(graph, BpOptions::new(n_iters))?;
    let unwrapped = unwrap_computation_tree(graph, root, n_iters)?;
    let tree = run_sync(&unwrapped.tree, BpOptions::new(n_iters))?;
    Ok(loopy.beliefs.get(root).linf(tree.beliefs.get(0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::{DiscreteDist, Grid, Kernel};
    use crate::graph::{build_chain, KernelSpec};

    fn triangle() -> FactorGraph {
        let g = Grid::unit(32).unwrap();
        let p = DiscreteDist::from_weights(
            g,
            (0..32)
                .map(|i| {
                    if (10..20).contains(&i) {
                        1.0 + (i % 3) as f64
                    } else {
                        0.0
                    }
                })
                .collect(),
        )
        .unwrap();
        let ks = KernelSpec::RandomNoise {
            width_bins: 5,
            seed: 11,
        }
        .kernels(3)
        .unwrap();
        FactorGraph::new(
            g,
            3,
            vec![
                FactorKind::Binary {
                    a: 0,
                    b: 1,
                    kernel: ks[0].clone(),
                },
                FactorKind::Binary {
                    a: 1,
                    b: 2,
                    kernel: ks[1].clone(),
                },
                FactorKind::Binary {
                    a: 2,
                    b: 0,
                    kernel: ks[2].clone(),
                },
                FactorKind::Unary {
                    target: 0,
                    potential: p,
                },
            ],
        )
        .unwrap()
    }

    #[test]
    fn triangle_depth_one() {
        let t = unwrap_computation_tree(&triangle(), 0, 1).unwrap();
        assert_eq!(t.origin, vec![0, 1, 2]);
        assert_eq!(t.tree.n_binary(), 2);
        assert_eq!(t.tree.n_unary(), 1);
        assert!(t.tree.is_singly_connected());
        assert!(check_tree_equivalence(&triangle(), 0, 1).unwrap() < 1e-12);
    }

    #[test]
    fn depth_zero_is_root_with_priors() {
        let t = unwrap_computation_tree(&triangle(), 0, 0).unwrap();
        assert_eq!(t.tree.n_vars(), 1);
        assert_eq!(t.tree.n_unary(), 1);
        assert_eq!(t.tree.n_binary(), 0);
    }

    #[test]
    fn cycle_grows_two_copies_per_level() {
        for depth in 0..8 {
            let t = unwrap_computation_tree(&triangle(), 1, depth).unwrap();
            assert_eq!(t.tree.n_vars(), 1 + 2 * depth);
            // one walk around each way
            for d in 1..=depth {
                let mut level: Vec<VarId> = (0..t.origin.len())
                    .filter(|n| t.depth[*n] == d)
                    .map(|n| t.origin[n])
                    .collect();
                level.sort();
                let mut walks = vec![(1 + d) % 3, (1 + 3 * d - d) % 3];
                walks.sort();
                assert_eq!(level, walks);
            }
        }
    }

    #[test]
    fn trees_unwrap_to_themselves() {
        let g = Grid::unit(32).unwrap();
        let p = DiscreteDist::from_weights(g, (0..32).map(|i| ((i * 5) % 7) as f64 + 0.2).collect()).unwrap();
        let graph = build_chain(
            5,
            vec![(0, p.clone()), (4, p)],
            &KernelSpec::Fixed {
                kernel: Kernel::gaussian(1.5, 3.0).unwrap(),
            },
            g,
        )
        .unwrap();
        for n in 1..6 {
            assert!(check_tree_equivalence(&graph, 2, n).unwrap() < 1e-12);
        }
    }
}

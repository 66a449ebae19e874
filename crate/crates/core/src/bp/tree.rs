use std::collections::VecDeque;

use super::{factor_message, product_into, BeliefSet, BpError};
use crate::dist::{DiscreteDist, Kernel};
use crate::graph::{FactorGraph, FactorId, FactorKind, VarId};

/// Exact marginals of a singly connected graph by one leaf-to-root and one
/// root-to-leaf sweep per connected component.
pub fn run_tree_exact(graph: &FactorGraph) -> Result<BeliefSet, BpError> {
    if !graph.is_singly_connected() {
        return Err(BpError::NotATree);
    }
    let n = graph.n_vars();
    let mut msgs: Vec<DiscreteDist> = vec![DiscreteDist::uniform(graph.grid()); graph.edges().len()];
    for f in graph.factors() {
        if let FactorKind::Unary { potential, .. } = &f.kind {
            msgs[graph.factor_edges(f.id)[0]] = potential.clone();
        }
    }
    let reflected: Vec<Option<Kernel>> = graph
        .factors()
        .iter()
        .map(|f| match &f.kind {
            FactorKind::Binary { kernel, .. } => Some(kernel.reflected()),
            FactorKind::Unary { .. } => None,
        })
        .collect();

    // BFS order per component with the parent link of each variable
    let mut parent: Vec<Option<(FactorId, VarId)>> = vec![None; n];
    let mut seen = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for root in 0..n {
        if seen[root] {
            continue;
        }
        seen[root] = true;
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for (f, u) in graph.neighbors(v) {
                if !seen[u] {
                    seen[u] = true;
                    parent[u] = Some((f, v));
                    queue.push_back(u);
                }
            }
        }
    }

    let send = |msgs: &mut Vec<DiscreteDist>, f: FactorId, to: VarId| -> Result<(), BpError> {
        let m = factor_message(graph, f, to, reflected[f].as_ref(), msgs).map_err(|_| BpError::ZeroMass {
            factor: f,
            variable: to,
            iteration: 0,
        })?;
        let e = graph.edge_between(f, to).expect("factor adjacent to target");
        msgs[e] = m;
        Ok(())
    };

    for &v in order.iter().rev() {
        if let Some((f, p)) = parent[v] {
            send(&mut msgs, f, p)?;
        }
    }
    for &v in &order {
        if let Some((f, _)) = parent[v] {
            send(&mut msgs, f, v)?;
        }
    }

    let beliefs = (0..n)
        .map(|v| {
            product_into(graph, v, None, &msgs).map_err(|_| BpError::ZeroBelief {
                variable: v,
                iteration: 0,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(BeliefSet::new(beliefs))
}

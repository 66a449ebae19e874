//! Factor graphs with unary potentials and shift-invariant binary kernels.

mod build;
mod random;

pub use build::{build_chain, build_grid_graph, build_star, build_tree, EdgeMask};
pub use random::{random_potential, random_window, KernelSpec, PriorSpec, RandomPotentialSpec};

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dist::{DiscreteDist, DistError, Grid, Kernel};

pub type VarId = usize;
pub type FactorId = usize;
/// Index of a directed factor-to-variable edge.
pub type EdgeId = usize;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("prior targets variable {var} but the graph has {n_vars} variables")]
    BadPrior { var: VarId, n_vars: usize },
    #[error("factor {factor} references variable {var}, graph has {n_vars}")]
    UnknownVariable {
        factor: FactorId,
        var: VarId,
        n_vars: usize,
    },
    #[error("binary factor {factor} connects variable {var} to itself")]
    SelfLoop { factor: FactorId, var: VarId },
    #[error("factor {factor} potential is on a different grid")]
    GridMismatch { factor: FactorId },
    #[error("invalid topology: {0}")]
    Topology(String),
    #[error(transparent)]
    Dist(#[from] DistError),
    #[error("graph json: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, PartialEq)]
pub struct VariableNode {
    pub id: VarId,
    /// Unary factors attached to this variable, in factor order.
    pub priors: Vec<FactorId>,
}

impl VariableNode {
    pub fn prior(&self) -> Option<FactorId> {
        self.priors.first().copied()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FactorKind {
    Unary {
        target: VarId,
        potential: DiscreteDist,
    },
    /// Potential `kernel(x_b - x_a)`.
    Binary {
        a: VarId,
        b: VarId,
        kernel: Kernel,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Factor {
    pub id: FactorId,
    pub kind: FactorKind,
}

impl Factor {
    pub fn is_binary(&self) -> bool {
        matches!(self.kind, FactorKind::Binary { .. })
    }

    /// Variables in slot order.
    pub fn scope(&self) -> Vec<VarId> {
        match &self.kind {
            FactorKind::Unary { target, .. } => vec![*target],
            FactorKind::Binary { a, b, .. } => vec![*a, *b],
        }
    }
}

/// Directed edge from a factor into one of its variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub factor: FactorId,
    pub var: VarId,
    /// Position of `var` in the factor scope (0 for unary and for `a`).
    pub slot: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FactorGraph {
    grid: Grid,
    variables: Vec<VariableNode>,
    factors: Vec<Factor>,
    edges: Vec<Edge>,
    factor_edges: Vec<Vec<EdgeId>>,
    var_edges: Vec<Vec<EdgeId>>,
    var_factors: Vec<Vec<FactorId>>,
}

impl FactorGraph {
    /// Assembles a graph over `n_vars` variables. Factor ids are positions in
    /// `factors`.
    pub fn new(grid: Grid, n_vars: usize, factors: Vec<FactorKind>) -> Result<Self, GraphError> {
        let mut variables: Vec<VariableNode> = (0..n_vars).map(|id| VariableNode { id, priors: Vec::new() }).collect();
        let mut edges = Vec::new();
        let mut factor_edges = Vec::with_capacity(factors.len());
        let mut var_edges = vec![Vec::new(); n_vars];
        let mut var_factors = vec![Vec::new(); n_vars];
        let mut out = Vec::with_capacity(factors.len());
        for (id, kind) in factors.into_iter().enumerate() {
            let f = Factor { id, kind };
            match &f.kind {
                FactorKind::Unary { target, potential } => {
                    if *target >= n_vars {
                        return Err(GraphError::UnknownVariable {
                            factor: id,
                            var: *target,
                            n_vars,
                        });
                    }
                    if potential.grid() != grid {
                        return Err(GraphError::GridMismatch { factor: id });
                    }
                    variables[*target].priors.push(id);
                }
                FactorKind::Binary { a, b, .. } => {
                    for v in [*a, *b] {
                        if v >= n_vars {
                            return Err(GraphError::UnknownVariable {
                                factor: id,
                                var: v,
                                n_vars,
                            });
                        }
                    }
                    if a == b {
                        return Err(GraphError::SelfLoop { factor: id, var: *a });
                    }
                }
            }
            let mut fe = Vec::new();
            for (slot, var) in f.scope().into_iter().enumerate() {
                let e = edges.len();
                edges.push(Edge { factor: id, var, slot });
                fe.push(e);
                var_edges[var].push(e);
                var_factors[var].push(id);
            }
            factor_edges.push(fe);
            out.push(f);
        }
        Ok(FactorGraph {
            grid,
            variables,
            factors: out,
            edges,
            factor_edges,
            var_edges,
            var_factors,
        })
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn n_vars(&self) -> usize {
        self.variables.len()
    }

    pub fn n_factors(&self) -> usize {
        self.factors.len()
    }

    pub fn variables(&self) -> &[VariableNode] {
        &self.variables
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn factor(&self, f: FactorId) -> &Factor {
        &self.factors[f]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Edges leaving factor `f`, in slot order.
    pub fn factor_edges(&self, f: FactorId) -> &[EdgeId] {
        &self.factor_edges[f]
    }

    /// Edges arriving at variable `v`.
    pub fn var_edges(&self, v: VarId) -> &[EdgeId] {
        &self.var_edges[v]
    }

    pub fn var_factors(&self, v: VarId) -> &[FactorId] {
        &self.var_factors[v]
    }

    pub fn degree(&self, v: VarId) -> usize {
        self.var_factors[v].len()
    }

    /// Edge carrying the message from `f` into `v`, if they are adjacent.
    pub fn edge_between(&self, f: FactorId, v: VarId) -> Option<EdgeId> {
        self.factor_edges[f].iter().copied().find(|e| self.edges[*e].var == v)
    }

    pub fn n_binary(&self) -> usize {
        self.factors.iter().filter(|f| f.is_binary()).count()
    }

    pub fn n_unary(&self) -> usize {
        self.factors.len() - self.n_binary()
    }

    /// Neighbouring variables reached through binary factors, with the factor.
    pub fn neighbors(&self, v: VarId) -> impl Iterator<Item = (FactorId, VarId)> + '_ {
        self.var_factors[v]
            .iter()
            .filter_map(move |f| match &self.factors[*f].kind {
                FactorKind::Binary { a, b, .. } => Some((*f, if *a == v { *b } else { *a })),
                FactorKind::Unary { .. } => None,
            })
    }

    /// Checks the structural invariants: arity, distinct endpoints, matching
    /// grids and consistent adjacency.
    pub fn validate(&self) -> Result<(), GraphError> {
        let n = self.n_vars();
        for f in &self.factors {
            for v in f.scope() {
                if v >= n {
                    return Err(GraphError::UnknownVariable {
                        factor: f.id,
                        var: v,
                        n_vars: n,
                    });
                }
            }
            match &f.kind {
                FactorKind::Binary { a, b, .. } if a == b => {
                    return Err(GraphError::SelfLoop { factor: f.id, var: *a })
                }
                FactorKind::Unary { potential, .. } if potential.grid() != self.grid => {
                    return Err(GraphError::GridMismatch { factor: f.id })
                }
                _ => {}
            }
            for (slot, e) in self.factor_edges[f.id].iter().enumerate() {
                let edge = self.edges[*e];
                if edge.factor != f.id || edge.slot != slot || !self.var_edges[edge.var].contains(e) {
                    return Err(GraphError::Topology(format!(
                        "adjacency out of sync at factor {}",
                        f.id
                    )));
                }
            }
        }
        Ok(())
    }

    /// True when the variable/binary-factor graph is a forest. Parallel
    /// binary factors between the same pair count as a cycle.
    pub fn is_singly_connected(&self) -> bool {
        let mut uf = UnionFind::new(self.n_vars());
        for f in &self.factors {
            if let FactorKind::Binary { a, b, .. } = f.kind {
                if !uf.union(a, b) {
                    return false;
                }
            }
        }
        true
    }

    /// Number of independent cycles (binary factors minus spanning-forest edges).
    pub fn cycle_rank(&self) -> usize {
        let mut uf = UnionFind::new(self.n_vars());
        self.factors
            .iter()
            .filter(|f| match f.kind {
                FactorKind::Binary { a, b, .. } => !uf.union(a, b),
                _ => false,
            })
            .count()
    }

    /// Hop distances (in binary factors) from the nearest of `sources`;
    /// unreachable variables get `None`.
    pub fn bfs_distances(&self, sources: &[VarId]) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n_vars()];
        let mut queue = VecDeque::new();
        for &s in sources {
            if dist[s].is_none() {
                dist[s] = Some(0);
                queue.push_back(s);
            }
        }
        while let Some(v) = queue.pop_front() {
            let d = dist[v].unwrap();
            for (_, u) in self.neighbors(v) {
                if dist[u].is_none() {
                    dist[u] = Some(d + 1);
                    queue.push_back(u);
                }
            }
        }
        dist
    }

    /// Distance of every variable to the nearest variable carrying a prior.
    pub fn distance_to_priors(&self) -> Vec<Option<usize>> {
        let sources: Vec<VarId> = self
            .variables
            .iter()
            .filter(|v| !v.priors.is_empty())
            .map(|v| v.id)
            .collect();
        self.bfs_distances(&sources)
    }

    /// Longest shortest path over all connected pairs.
    pub fn diameter(&self) -> usize {
        (0..self.n_vars())
            .map(|v| self.bfs_distances(&[v]).into_iter().flatten().max().unwrap_or(0))
            .max()
            .unwrap_or(0)
    }

    pub fn to_json(&self) -> Result<String, GraphError> {
        Ok(serde_json::to_string_pretty(&GraphDoc::from(self))?)
    }

    pub fn from_json(s: &str) -> Result<Self, GraphError> {
        let doc: GraphDoc = serde_json::from_str(s)?;
        doc.into_graph()
    }
}

/// Serialized form. Adjacency is rebuilt on load.
#[derive(Serialize, Deserialize)]
struct GraphDoc {
    grid: Grid,
    n_variables: usize,
    factors: Vec<FactorDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
enum FactorDoc {
    Unary { target: VarId, potential: Vec<f64> },
    Binary { a: VarId, b: VarId, kernel: Kernel },
}

impl From<&FactorGraph> for GraphDoc {
    fn from(g: &FactorGraph) -> Self {
        GraphDoc {
            grid: g.grid,
            n_variables: g.n_vars(),
            factors: g
                .factors
                .iter()
                .map(|f| match &f.kind {
                    FactorKind::Unary { target, potential } => FactorDoc::Unary {
                        target: *target,
                        potential: potential.mass().to_vec(),
                    },
                    FactorKind::Binary { a, b, kernel } => FactorDoc::Binary {
                        a: *a,
                        b: *b,
                        kernel: kernel.clone(),
                    },
                })
                .collect(),
        }
    }
}

impl GraphDoc {
    fn into_graph(self) -> Result<FactorGraph, GraphError> {
        let grid = self.grid;
        let factors = self
            .factors
            .into_iter()
            .map(|f| {
                Ok(match f {
                    FactorDoc::Unary { target, potential } => FactorKind::Unary {
                        target,
                        potential: DiscreteDist::from_weights(grid, potential)?,
                    },
                    FactorDoc::Binary { a, b, kernel } => FactorKind::Binary { a, b, kernel },
                })
            })
            .collect::<Result<Vec<_>, GraphError>>()?;
        FactorGraph::new(grid, self.n_variables, factors)
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false when `a` and `b` were already connected.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        true
    }
}

//! Discretized sum-product belief propagation.
//!
//! Messages are stored per directed factor-to-variable edge. A
//! variable-to-factor message is never stored: it is the product of the
//! variable's other incoming factor messages and is recomputed on demand.

mod trace;
mod tree;

pub use trace::{convergence_check, write_trace_csv, BpTrace, NotConverged, TraceLevel};
pub use tree::run_tree_exact;

use rayon::prelude::*;
use thiserror::Error;

use crate::dist::{cumulants, DiscreteDist, DistError, Kernel};
use crate::graph::{EdgeId, FactorGraph, FactorId, FactorKind, VarId};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BpError {
    #[error("message from factor {factor} to variable {variable} vanished at iteration {iteration}")]
    ZeroMass {
        factor: FactorId,
        variable: VarId,
        iteration: usize,
    },
    #[error("belief of variable {variable} vanished at iteration {iteration}")]
    ZeroBelief { variable: VarId, iteration: usize },
    #[error("graph contains a cycle; exact two-pass schedule needs a tree")]
    NotATree,
    #[error("invalid options: {0}")]
    InvalidOptions(String),
    #[error(transparent)]
    Dist(#[from] DistError),
}

/// One normalized belief per variable.
#[derive(Debug, Clone, PartialEq)]
pub struct BeliefSet {
    beliefs: Vec<DiscreteDist>,
}

impl BeliefSet {
    pub fn new(beliefs: Vec<DiscreteDist>) -> Self {
        BeliefSet { beliefs }
    }

    pub fn get(&self, v: VarId) -> &DiscreteDist {
        &self.beliefs[v]
    }

    pub fn len(&self) -> usize {
        self.beliefs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.beliefs.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, DiscreteDist> {
        self.beliefs.iter()
    }

    pub fn into_vec(self) -> Vec<DiscreteDist> {
        self.beliefs
    }

    /// Largest bin-wise change of any belief.
    pub fn max_linf(&self, other: &BeliefSet) -> f64 {
        self.beliefs
            .iter()
            .zip(&other.beliefs)
            .fold(0.0f64, |acc, (a, b)| acc.max(a.linf(b)))
    }
}

/// Normalized product of the messages arriving at `v` over `edges`, skipping
/// those sent by `skip`. Empty products are uniform.
fn product_into(
    graph: &FactorGraph,
    v: VarId,
    skip: Option<FactorId>,
    msgs: &[DiscreteDist],
) -> Result<DiscreteDist, DistError> {
    let mut acc: Option<DiscreteDist> = None;
    for &e in graph.var_edges(v) {
        if Some(graph.edges()[e].factor) == skip {
            continue;
        }
        acc = Some(match acc {
            None => msgs[e].clone(),
            Some(a) => a.product(&msgs[e])?,
        });
    }
    Ok(acc.unwrap_or_else(|| DiscreteDist::uniform(graph.grid())))
}

/// Message from variable `v` to factor `f`: the product of `v`'s incoming
/// factor messages in `msgs` except the one from `f`.
pub fn var_to_factor(
    graph: &FactorGraph,
    v: VarId,
    f: FactorId,
    msgs: &[DiscreteDist],
) -> Result<DiscreteDist, DistError> {
    product_into(graph, v, Some(f), msgs)
}

/// Message from factor `f` to variable `v` computed from `msgs`.
pub fn factor_to_var(
    graph: &FactorGraph,
    f: FactorId,
    v: VarId,
    msgs: &[DiscreteDist],
) -> Result<DiscreteDist, DistError> {
    let reflected = match &graph.factor(f).kind {
        FactorKind::Binary { kernel, .. } => Some(kernel.reflected()),
        FactorKind::Unary { .. } => None,
    };
    factor_message(graph, f, v, reflected.as_ref(), msgs)
}

fn factor_message(
    graph: &FactorGraph,
    f: FactorId,
    v: VarId,
    reflected: Option<&Kernel>,
    msgs: &[DiscreteDist],
) -> Result<DiscreteDist, DistError> {
    match &graph.factor(f).kind {
        FactorKind::Unary { potential, .. } => Ok(potential.clone()),
        FactorKind::Binary { a, b, kernel } => {
            if v == *b {
                var_to_factor(graph, *a, f, msgs)?.convolve(kernel)
            } else {
                let reflected = reflected.expect("reflected kernel for binary factor");
                var_to_factor(graph, *b, f, msgs)?.convolve(reflected)
            }
        }
    }
}

/// Beliefs from the current factor-to-variable messages.
pub fn beliefs_from(graph: &FactorGraph, msgs: &[DiscreteDist]) -> Result<BeliefSet, BpError> {
    beliefs_at(graph, msgs, 0, false)
}

fn beliefs_at(
    graph: &FactorGraph,
    msgs: &[DiscreteDist],
    iteration: usize,
    parallel: bool,
) -> Result<BeliefSet, BpError> {
    let one = |v: VarId| product_into(graph, v, None, msgs).map_err(|_| BpError::ZeroBelief { variable: v, iteration });
    let beliefs: Vec<Result<DiscreteDist, BpError>> = if parallel {
        (0..graph.n_vars()).into_par_iter().map(one).collect()
    } else {
        (0..graph.n_vars()).map(one).collect()
    };
    Ok(BeliefSet::new(beliefs.into_iter().collect::<Result<_, _>>()?))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BpOptions {
    pub iterations: usize,
    /// Weight of the previous message in `(1 - d) * new + d * old`.
    pub damping: f64,
    /// Compute the messages of one iteration on the rayon pool.
    pub parallel: bool,
    pub trace: TraceLevel,
}

impl BpOptions {
    pub fn new(iterations: usize) -> Self {
        BpOptions {
            iterations,
            damping: 0.0,
            parallel: false,
            trace: TraceLevel::Deltas,
        }
    }

    pub fn with_trace(mut self, trace: TraceLevel) -> Self {
        self.trace = trace;
        self
    }

    pub fn with_parallel(mut self, parallel: bool) -> Self {
        self.parallel = parallel;
        self
    }

    pub fn with_damping(mut self, damping: f64) -> Self {
        self.damping = damping;
        self
    }

    fn check(&self) -> Result<(), BpError> {
        if self.iterations < 1 {
            return Err(BpError::InvalidOptions("iterations must be >= 1".into()));
        }
        if !(0.0..1.0).contains(&self.damping) {
            return Err(BpError::InvalidOptions(format!(
                "damping {} not in [0, 1)",
                self.damping
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct BpRun {
    pub beliefs: BeliefSet,
    pub trace: BpTrace,
    /// Final factor-to-variable messages, indexed by edge.
    pub messages: Vec<DiscreteDist>,
}

/// Double-buffered factor-to-variable messages.
#[derive(Debug, Clone)]
pub struct MessageStore {
    prev: Vec<DiscreteDist>,
    cur: Vec<DiscreteDist>,
}

impl MessageStore {
    /// Binary-factor messages uniform; a unary factor has no inputs, so its
    /// message is its potential from the start.
    pub fn initial(graph: &FactorGraph) -> Self {
        let mut prev = uniform_messages(graph);
        for f in graph.factors() {
            if let FactorKind::Unary { potential, .. } = &f.kind {
                prev[graph.factor_edges(f.id)[0]] = potential.clone();
            }
        }
        MessageStore {
            cur: prev.clone(),
            prev,
        }
    }

    pub fn previous(&self) -> &[DiscreteDist] {
        &self.prev
    }

    pub fn current(&self) -> &[DiscreteDist] {
        &self.cur
    }

    fn swap(&mut self) {
        std::mem::swap(&mut self.prev, &mut self.cur);
    }
}

/// Synchronous BP: every message of iteration `t` is computed from the
/// messages of iteration `t - 1`. At `t = 0` binary-factor messages are
/// uniform and unary messages equal their potentials.
pub fn run_sync(graph: &FactorGraph, opts: BpOptions) -> Result<BpRun, BpError> {
    run_sync_observed(graph, opts, |_, _| {})
}

/// [`run_sync`] calling `observer(t, beliefs)` for `t = 0..=iterations`.
pub fn run_sync_observed<F>(graph: &FactorGraph, opts: BpOptions, mut observer: F) -> Result<BpRun, BpError>
where
    F: FnMut(usize, &BeliefSet),
{
    opts.check()?;
    let reflected: Vec<Option<Kernel>> = graph
        .factors()
        .iter()
        .map(|f| match &f.kind {
            FactorKind::Binary { kernel, .. } => Some(kernel.reflected()),
            FactorKind::Unary { .. } => None,
        })
        .collect();
    let mut store = MessageStore::initial(graph);
    let mut beliefs = beliefs_at(graph, &store.cur, 0, opts.parallel)?;
    let mut trace = BpTrace::new(opts.trace);
    observer(0, &beliefs);

    for t in 1..=opts.iterations {
        store.swap();
        let prev = store.prev.as_slice();
        let compute = |e: EdgeId| -> Result<DiscreteDist, BpError> {
            let edge = graph.edges()[e];
            let zero = |_| BpError::ZeroMass {
                factor: edge.factor,
                variable: edge.var,
                iteration: t,
            };
            let m =
                factor_message(graph, edge.factor, edge.var, reflected[edge.factor].as_ref(), prev).map_err(zero)?;
            if opts.damping > 0.0 {
                m.mix(&prev[e], opts.damping).map_err(zero)
            } else {
                Ok(m)
            }
        };
        let n_edges = graph.edges().len();
        let next: Vec<Result<DiscreteDist, BpError>> = if opts.parallel {
            (0..n_edges).into_par_iter().map(compute).collect()
        } else {
            (0..n_edges).map(compute).collect()
        };
        store.cur = next.into_iter().collect::<Result<_, _>>()?;

        let new_beliefs = beliefs_at(graph, &store.cur, t, opts.parallel)?;
        trace.record(&beliefs, &new_beliefs, opts.parallel);
        beliefs = new_beliefs;
        observer(t, &beliefs);
    }
    Ok(BpRun {
        beliefs,
        trace,
        messages: store.cur,
    })
}

/// Cumulant summaries of every belief; `None` where the variance is degenerate.
pub fn summarize(beliefs: &BeliefSet, parallel: bool) -> Vec<Option<crate::dist::CumulantSummary>> {
    if parallel {
        beliefs.beliefs.par_iter().map(|b| cumulants(b).ok()).collect()
    } else {
        beliefs.beliefs.iter().map(|b| cumulants(b).ok()).collect()
    }
}

/// Uniform distribution helper for callers building message buffers.
pub fn uniform_messages(graph: &FactorGraph) -> Vec<DiscreteDist> {
    vec![DiscreteDist::uniform(graph.grid()); graph.edges().len()]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::{gaussian_on_grid, Grid};
    use crate::graph::{build_chain, KernelSpec};

    fn grid() -> Grid {
        Grid::new(1024, -32.0, 31.0).unwrap()
    }

    fn fixed(k: Kernel) -> KernelSpec {
        KernelSpec::Fixed { kernel: k }
    }

    #[test]
    fn leaf_sends_uniform_and_prior_passes_through() {
        let g = Grid::unit(16).unwrap();
        let p = DiscreteDist::from_weights(g, (0..16).map(|i| (i % 4) as f64 + 1.0).collect()).unwrap();
        let graph = build_chain(2, vec![(0, p.clone())], &fixed(Kernel::identity()), g).unwrap();
        let mut msgs = uniform_messages(&graph);
        // variable 1 has only factor 0
        assert_eq!(var_to_factor(&graph, 1, 0, &msgs).unwrap(), DiscreteDist::uniform(g));
        // variable 0: prior factor 1 feeds factor 0
        let e = graph.edge_between(1, 0).unwrap();
        msgs[e] = p.clone();
        assert_eq!(var_to_factor(&graph, 0, 0, &msgs).unwrap(), p);
        assert_eq!(factor_to_var(&graph, 1, 0, &msgs).unwrap(), p);
    }

    #[test]
    fn two_gaussian_messages_multiply() {
        let g = grid();
        let n01 = gaussian_on_grid(0.0, 1.0, g).unwrap();
        let graph = crate::graph::build_star(2, vec![n01.clone(), n01.clone()], &fixed(Kernel::identity()), g).unwrap();
        let mut msgs = uniform_messages(&graph);
        for f in 0..2 {
            msgs[graph.edge_between(f, 0).unwrap()] = n01.clone();
        }
        // centre has two binary factors; add a third virtual consumer by
        // computing the full product
        let b = product_into(&graph, 0, None, &msgs).unwrap();
        assert!((b.variance() - 0.5).abs() < 0.01);
    }

    #[test]
    fn shift_kernel_moves_delta() {
        let g = Grid::unit(16).unwrap();
        let graph = build_chain(
            2,
            vec![(0, DiscreteDist::delta(g, 5).unwrap())],
            &fixed(Kernel::shift(3)),
            g,
        )
        .unwrap();
        let run = run_sync(&graph, BpOptions::new(2)).unwrap();
        assert_eq!(run.beliefs.get(1), &DiscreteDist::delta(g, 8).unwrap());
        let back = build_chain(
            2,
            vec![(1, DiscreteDist::delta(g, 8).unwrap())],
            &fixed(Kernel::shift(3)),
            g,
        )
        .unwrap();
        let run = run_sync(&back, BpOptions::new(2)).unwrap();
        assert_eq!(run.beliefs.get(0), &DiscreteDist::delta(g, 5).unwrap());
    }

    #[test]
    fn forward_backward_adds_twice_kernel_variance() {
        let g = grid();
        let k = Kernel::gaussian(6.0, 5.0).unwrap();
        let kvar = k.var_bins() * g.step() * g.step();
        let p = gaussian_on_grid(0.0, 1.0, g).unwrap();
        let graph = build_chain(2, vec![(0, p.clone())], &fixed(k.clone()), g).unwrap();
        let mut msgs = uniform_messages(&graph);
        msgs[graph.edge_between(1, 0).unwrap()] = p.clone();
        let fwd = factor_to_var(&graph, 0, 1, &msgs).unwrap();
        // feed forward result back as variable 1's only other input
        let graph2 = build_chain(2, vec![(1, fwd.clone())], &fixed(k), g).unwrap();
        let mut msgs2 = uniform_messages(&graph2);
        msgs2[graph2.edge_between(1, 1).unwrap()] = fwd;
        let back = factor_to_var(&graph2, 0, 0, &msgs2).unwrap();
        assert!((back.variance() - (p.variance() + 2.0 * kvar)).abs() < 1e-6);
    }

    #[test]
    fn prior_only_variable_belief_is_prior() {
        let g = Grid::unit(16).unwrap();
        let p = DiscreteDist::from_weights(g, (0..16).map(|i| (i * i % 7) as f64 + 0.1).collect()).unwrap();
        let graph = crate::graph::FactorGraph::new(
            g,
            1,
            vec![FactorKind::Unary {
                target: 0,
                potential: p.clone(),
            }],
        )
        .unwrap();
        let run = run_sync(&graph, BpOptions::new(1)).unwrap();
        assert!(run.beliefs.get(0).linf(&p) < 1e-15);
    }

    #[test]
    fn serial_and_parallel_agree_bitwise() {
        let g = Grid::unit(64).unwrap();
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(3);
        let priors = (0..4)
            .map(|i| (i * 5, crate::graph::random_window(g, 16, &mut rng).unwrap()))
            .collect();
        let graph = crate::graph::build_grid_graph(
            4,
            5,
            priors,
            &KernelSpec::RandomNoise { width_bins: 8, seed: 4 },
            g,
            None,
        )
        .unwrap();
        let opts = BpOptions::new(15).with_trace(TraceLevel::Summaries);
        let a = run_sync(&graph, opts).unwrap();
        let b = run_sync(&graph, opts.with_parallel(true)).unwrap();
        assert_eq!(a.beliefs, b.beliefs);
        assert_eq!(a.messages, b.messages);
        let mut ca = Vec::new();
        let mut cb = Vec::new();
        write_trace_csv(&a.trace, &mut ca).unwrap();
        write_trace_csv(&b.trace, &mut cb).unwrap();
        assert_eq!(ca, cb);
    }

    #[test]
    fn vanished_messages_are_reported() {
        let g = Grid::unit(8).unwrap();
        let graph = build_chain(
            2,
            vec![
                (0, DiscreteDist::delta(g, 1).unwrap()),
                (1, DiscreteDist::delta(g, 6).unwrap()),
            ],
            &fixed(Kernel::identity()),
            g,
        )
        .unwrap();
        let err = run_sync(&graph, BpOptions::new(3)).unwrap_err();
        assert!(matches!(err, BpError::ZeroBelief { iteration: 1, .. }), "{err:?}");
        let graph = build_chain(
            2,
            vec![(0, DiscreteDist::delta(g, 7).unwrap())],
            &fixed(Kernel::shift(2)),
            g,
        )
        .unwrap();
        let msgs = MessageStore::initial(&graph);
        assert_eq!(factor_to_var(&graph, 0, 1, msgs.current()), Err(DistError::ZeroMass));
        let err = run_sync(&graph, BpOptions::new(3)).unwrap_err();
        assert_eq!(
            err,
            BpError::ZeroMass {
                factor: 0,
                variable: 1,
                iteration: 1
            }
        );
    }

    #[test]
    fn damping_validated() {
        let g = Grid::unit(8).unwrap();
        let graph = build_chain(2, vec![], &fixed(Kernel::identity()), g).unwrap();
        assert!(run_sync(&graph, BpOptions::new(0)).is_err());
        assert!(run_sync(&graph, BpOptions::new(1).with_damping(1.0)).is_err());
        assert!(run_sync(&graph, BpOptions::new(1).with_damping(0.5)).is_ok());
    }
}

//! Chain, tree, star and grid runs: per-variable belief statistics against
//! topological distance to the nearest prior.

use std::collections::BTreeMap;

use bpclt_core::bp::{run_sync, run_tree_exact, BeliefSet, BpOptions};
use bpclt_core::dist::{DiscreteDist, Grid};
use bpclt_core::gbp::{gbp_run_sync, GbpOptions};
use bpclt_core::graph::{build_chain, build_grid_graph, build_star, build_tree, FactorGraph, FactorKind, PriorSpec};
use serde_json::json;

use super::{prior_rng, summary_or_nan, SeedOutput};
use crate::config::*;
use crate::table::Table;
use crate::{RunError, SeedContext};

fn draw(prior: &PriorSpec, grid: Grid, count: usize, seed: u64) -> Result<Vec<DiscreteDist>, RunError> {
    let mut rng = prior_rng(seed);
    (0..count)
        .map(|_| prior.materialize(grid, &mut rng).seed(seed))
        .collect()
}

fn with_vars(vars: &[usize], priors: Vec<DiscreteDist>) -> Vec<(usize, DiscreteDist)> {
    vars.iter().copied().zip(priors).collect()
}

pub(crate) fn chain(
    n: usize,
    prior_vars: &[usize],
    grid: Grid,
    kernel: &KernelTemplate,
    prior: &PriorSpec,
    seed: u64,
) -> Result<FactorGraph, RunError> {
    let priors = draw(prior, grid, prior_vars.len(), seed)?;
    build_chain(n, with_vars(prior_vars, priors), &kernel.spec(seed), grid).seed(seed)
}

pub(crate) fn star(
    n_outer: usize,
    grid: Grid,
    kernel: &KernelTemplate,
    prior: &PriorSpec,
    seed: u64,
) -> Result<FactorGraph, RunError> {
    let priors = draw(prior, grid, n_outer, seed)?;
    build_star(n_outer, priors, &kernel.spec(seed), grid).seed(seed)
}

/// Cycle `0 - 1 - ... - (n-1) - 0`; binary factors in order, then priors.
pub(crate) fn cycle(
    n: usize,
    prior_vars: &[usize],
    grid: Grid,
    kernel: &KernelTemplate,
    prior: &PriorSpec,
    seed: u64,
) -> Result<FactorGraph, RunError> {
    let kernels = kernel.spec(seed).kernels(n).seed(seed)?;
    let priors = draw(prior, grid, prior_vars.len(), seed)?;
    let mut factors: Vec<FactorKind> = kernels
        .into_iter()
        .enumerate()
        .map(|(i, kernel)| FactorKind::Binary {
            a: i,
            b: (i + 1) % n,
            kernel,
        })
        .collect();
    factors.extend(
        with_vars(prior_vars, priors)
            .into_iter()
            .map(|(target, potential)| FactorKind::Unary { target, potential }),
    );
    FactorGraph::new(grid, n, factors).seed(seed)
}

/// The graph an experiment runs on for `seed`, or `None` for kinds that
/// build several graphs per seed from image data.
pub fn build_topology(exp: &Experiment, seed: u64) -> Option<Result<FactorGraph, RunError>> {
    Some(match exp {
        Experiment::Chain(p) => {
            let vars = p
                .prior_vars
                .clone()
                .unwrap_or_else(|| vec![0, p.n_vars.saturating_sub(1)]);
            chain(p.n_vars, &vars, p.grid, &p.kernel, &p.prior, seed)
        }
        Experiment::Tree(p) => {
            let leaves = p.branching.pow(p.depth as u32);
            draw(&p.prior, p.grid, leaves, seed)
                .and_then(|pr| build_tree(p.depth, p.branching, pr, &p.kernel.spec(seed), p.grid).seed(seed))
        }
        Experiment::Star(p) => star(p.n_outer, p.grid, &p.kernel, &p.prior, seed),
        Experiment::Grid(p) => {
            let vars = p.prior_vars.clone().unwrap_or_else(|| vec![0]);
            draw(&p.prior, p.grid, vars.len(), seed).and_then(|pr| {
                build_grid_graph(p.rows, p.cols, with_vars(&vars, pr), &p.kernel.spec(seed), p.grid, None).seed(seed)
            })
        }
        Experiment::PriorSweep(p) => {
            let w = p.widths.values().first().copied().unwrap_or(1);
            let vars: Vec<usize> = (0..p.n_vars).collect();
            chain(
                p.n_vars,
                &vars,
                p.grid,
                &p.kernel,
                &PriorSpec::Box { width_bins: w },
                seed,
            )
        }
        Experiment::DegreeSweep(p) => {
            let n = p.degrees.values().first().copied().unwrap_or(2);
            star(n, p.grid, &p.kernel, &p.prior, seed)
        }
        Experiment::ConvergenceRate(p) => chain(p.max_depth + 1, &[0], p.grid, &p.kernel, &p.prior, seed),
        Experiment::TreeEquivalence(p) => match p.graph {
            LoopyGraph::Cycle { n } => cycle(n, &p.prior_vars, p.grid, &p.kernel, &p.prior, seed),
            LoopyGraph::Grid { rows, cols } => draw(&p.prior, p.grid, p.prior_vars.len(), seed).and_then(|pr| {
                build_grid_graph(
                    rows,
                    cols,
                    with_vars(&p.prior_vars, pr),
                    &p.kernel.spec(seed),
                    p.grid,
                    None,
                )
                .seed(seed)
            }),
        },
        Experiment::Stereo(_) => return None,
    })
}

/// BP beliefs under `schedule`, with the iteration at which the largest
/// belief change fell below 1e-9 for synchronous runs.
pub(crate) fn run_bp(
    graph: &FactorGraph,
    schedule: Schedule,
    seed: u64,
) -> Result<(BeliefSet, Option<usize>), RunError> {
    match schedule {
        Schedule::Exact => Ok((run_tree_exact(graph).seed(seed)?, None)),
        Schedule::Sync { iterations, damping } => {
            let run = run_sync(graph, BpOptions::new(iterations).with_damping(damping)).seed(seed)?;
            let settled = bpclt_core::bp::convergence_check(&run.trace, 1e-9).ok();
            Ok((run.beliefs, settled))
        }
    }
}

fn gbp_iterations(graph: &FactorGraph, schedule: Schedule) -> (usize, f64) {
    match schedule {
        Schedule::Exact => (graph.diameter() + 1, 0.0),
        Schedule::Sync { iterations, damping } => (iterations, damping),
    }
}

fn params(exp: &Experiment) -> (Schedule, EngineChoice) {
    match exp {
        Experiment::Chain(p) => (p.schedule, p.engine),
        Experiment::Tree(p) => (p.schedule, p.engine),
        Experiment::Star(p) => (p.schedule, p.engine),
        Experiment::Grid(p) => (p.schedule, p.engine),
        _ => unreachable!("not a topology experiment"),
    }
}

/// Per-variable CSV `variable,distance,...`; the summary averages over the
/// variables at each distance from the nearest prior.
pub fn run(exp: &Experiment, seed: u64) -> Result<SeedOutput, RunError> {
    let (schedule, engine) = params(exp);
    let graph = build_topology(exp, seed).expect("topology kind")?;
    let dist = graph.distance_to_priors();
    let mut values: Vec<&str> = Vec::new();
    if engine.bp() {
        values.extend(["mu", "var", "skew", "exkurt", "eps", "kl_gauss"]);
    }
    if engine.gbp() {
        values.extend(["gbp_mu", "gbp_var"]);
    }
    let mut csv = Table::new(&["variable", "distance"], &values);
    let mut rows: Vec<Vec<f64>> = vec![Vec::new(); graph.n_vars()];
    let mut settled = None;
    if engine.bp() {
        let (beliefs, s) = run_bp(&graph, schedule, seed)?;
        settled = s;
        for (v, b) in beliefs.iter().enumerate() {
            let s = summary_or_nan(b);
            rows[v].extend([s.mu, s.var, s.skew, s.exkurt, s.eps, s.kl_gauss]);
        }
    }
    if engine.gbp() {
        let (iterations, damping) = gbp_iterations(&graph, schedule);
        let run = gbp_run_sync(&graph, GbpOptions::new(iterations).with_damping(damping)).seed(seed)?;
        for (v, g) in run.beliefs.iter().enumerate() {
            rows[v].extend([g.mean(), g.var()]);
        }
    }
    let dist_key = |d: Option<usize>| d.map_or("NaN".to_string(), |d| d.to_string());
    for (v, row) in rows.into_iter().enumerate() {
        csv.push(vec![v.to_string(), dist_key(dist[v])], row);
    }

    let mut by_distance: BTreeMap<Option<usize>, Vec<usize>> = BTreeMap::new();
    for (v, d) in dist.iter().enumerate() {
        by_distance.entry(*d).or_default().push(v);
    }
    let mut sum_cols = vec!["n_vars"];
    let picked: Vec<(&str, usize)> = ["kl_gauss", "eps", "var", "gbp_var"]
        .into_iter()
        .filter_map(|c| csv.col(c).map(|i| (c, i)))
        .collect();
    sum_cols.extend(picked.iter().map(|(c, _)| *c));
    let mut summary = Table::new(&["distance"], &sum_cols);
    for (d, vars) in &by_distance {
        let mut row = vec![vars.len() as f64];
        for (_, i) in &picked {
            let xs: Vec<f64> = vars
                .iter()
                .map(|v| csv.rows[*v].1[*i])
                .filter(|x| x.is_finite())
                .collect();
            row.push(if xs.is_empty() {
                f64::NAN
            } else {
                xs.iter().sum::<f64>() / xs.len() as f64
            });
        }
        summary.push(vec![dist_key(*d)], row);
    }
    Ok(SeedOutput {
        seed,
        csv,
        summary,
        extra: json!({ "n_vars": graph.n_vars(), "n_factors": graph.n_factors(), "settled_at": settled }),
        files: Vec::new(),
    })
}

//! Gaussian belief propagation on the same factor graphs.
//!
//! Priors are projected to Gaussians once, binary kernels are summarized by
//! their mean and variance, and messages are kept in information form so
//! products at variables are sums.

use std::io::{self, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dist::{DiscreteDist, DistError, DEGENERATE_VARIANCE};
use crate::graph::{EdgeId, FactorGraph, FactorKind, VarId};

/// Gaussian in information form. `precision == 0` is the vague message.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct GaussianMsg {
    precision: f64,
    information: f64,
}

impl GaussianMsg {
    pub const VAGUE: GaussianMsg = GaussianMsg {
        precision: 0.0,
        information: 0.0,
    };

    pub fn from_moments(mean: f64, var: f64) -> Self {
        assert!(var > 0.0, "Gaussian variance must be positive, got {var}");
        GaussianMsg {
            precision: 1.0 / var,
            information: mean / var,
        }
    }

    pub fn from_information(precision: f64, information: f64) -> Self {
        assert!(precision >= 0.0, "precision must be >= 0, got {precision}");
        if precision == 0.0 {
            return GaussianMsg::VAGUE;
        }
        GaussianMsg { precision, information }
    }

    pub fn precision(&self) -> f64 {
        self.precision
    }

    pub fn information(&self) -> f64 {
        self.information
    }

    pub fn is_vague(&self) -> bool {
        self.precision == 0.0
    }

    /// `NaN` for the vague message.
    pub fn mean(&self) -> f64 {
        if self.is_vague() {
            f64::NAN
        } else {
            self.information / self.precision
        }
    }

    /// `+inf` for the vague message.
    pub fn var(&self) -> f64 {
        1.0 / self.precision
    }

    pub fn product(&self, other: &GaussianMsg) -> GaussianMsg {
        GaussianMsg {
            precision: self.precision + other.precision,
            information: self.information + other.information,
        }
    }

    /// Distribution of `X + Y` with `Y ~ (shift, spread)` independent.
    pub fn add_independent(&self, shift: f64, spread: f64) -> GaussianMsg {
        if self.is_vague() {
            return GaussianMsg::VAGUE;
        }
        GaussianMsg::from_moments(self.mean() + shift, self.var() + spread)
    }

    fn mix(&self, old: &GaussianMsg, damping: f64) -> GaussianMsg {
        GaussianMsg {
            precision: (1.0 - damping) * self.precision + damping * old.precision,
            information: (1.0 - damping) * self.information + damping * old.information,
        }
    }
}

/// How a non-Gaussian prior becomes a Gaussian message.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Projection {
    /// Mean and variance of the mass.
    #[default]
    Moment,
    /// Mean at the most probable bin, variance of the mass.
    Mode,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GbpError {
    #[error("variable {0} received no evidence")]
    AllVague(VarId),
    #[error("invalid options: {0}")]
    InvalidOptions(String),
    #[error(transparent)]
    Dist(#[from] DistError),
}

/// Moment-matched Gaussian of `d`.
pub fn gaussian_project(d: &DiscreteDist) -> Result<GaussianMsg, DistError> {
    project(d, Projection::Moment)
}

pub fn project(d: &DiscreteDist, how: Projection) -> Result<GaussianMsg, DistError> {
    let var = d.variance();
    if !(var >= DEGENERATE_VARIANCE) {
        return Err(DistError::DegenerateVariance(var));
    }
    let mean = match how {
        Projection::Moment => d.mean(),
        Projection::Mode => d.grid().center(d.argmax()),
    };
    Ok(GaussianMsg::from_moments(mean, var))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GbpOptions {
    pub iterations: usize,
    pub damping: f64,
    pub parallel: bool,
    pub projection: Projection,
    pub record_trace: bool,
}

impl GbpOptions {
    pub fn new(iterations: usize) -> Self {
        GbpOptions {
            iterations,
            damping: 0.0,
            parallel: false,
            projection: Projection::Moment,
            record_trace: true,
        }
    }

    pub fn with_projection(mut self, projection: Projection) -> Self {
        self.projection = projection;
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

    pub fn with_trace(mut self, record: bool) -> Self {
        self.record_trace = record;
        self
    }
}

#[derive(Debug, Clone)]
pub struct GbpRun {
    pub beliefs: Vec<GaussianMsg>,
    /// `trace[t - 1][v] = (mean, var)` after iteration `t`.
    pub trace: Vec<Vec<(f64, f64)>>,
    /// Final factor-to-variable messages, indexed by edge.
    pub messages: Vec<GaussianMsg>,
}

enum Local {
    Unary(GaussianMsg),
    /// kernel mean and variance in state units
    Binary {
        a: VarId,
        b: VarId,
        mean: f64,
        var: f64,
    },
}

fn sum_into(graph: &FactorGraph, v: VarId, skip: Option<usize>, msgs: &[GaussianMsg]) -> GaussianMsg {
    graph
        .var_edges(v)
        .iter()
        .filter(|e| Some(graph.edges()[**e].factor) != skip)
        .fold(GaussianMsg::VAGUE, |acc, e| acc.product(&msgs[*e]))
}

/// Synchronous GBP mirroring [`crate::bp::run_sync`]: binary-factor messages
/// start vague, unary messages start at the projected prior.
pub fn gbp_run_sync(graph: &FactorGraph, opts: GbpOptions) -> Result<GbpRun, GbpError> {
    gbp_run_observed(graph, opts, |_, _| {})
}

/// [`gbp_run_sync`] calling `observer(t, beliefs)` for `t = 0..=iterations`.
pub fn gbp_run_observed<F>(graph: &FactorGraph, opts: GbpOptions, mut observer: F) -> Result<GbpRun, GbpError>
where
    F: FnMut(usize, &[GaussianMsg]),
{
    if opts.iterations < 1 {
        return Err(GbpError::InvalidOptions("iterations must be >= 1".into()));
    }
    if !(0.0..1.0).contains(&opts.damping) {
        return Err(GbpError::InvalidOptions(format!(
            "damping {} not in [0, 1)",
            opts.damping
        )));
    }
    let step = graph.grid().step();
    let local = graph
        .factors()
        .iter()
        .map(|f| {
            Ok(match &f.kind {
                FactorKind::Unary { potential, .. } => Local::Unary(project(potential, opts.projection)?),
                FactorKind::Binary { a, b, kernel } => Local::Binary {
                    a: *a,
                    b: *b,
                    mean: kernel.mean_bins() * step,
                    var: kernel.var_bins() * step * step,
                },
            })
        })
        .collect::<Result<Vec<_>, DistError>>()?;

    let n_edges = graph.edges().len();
    let mut prev = vec![GaussianMsg::VAGUE; n_edges];
    for (f, l) in local.iter().enumerate() {
        if let Local::Unary(g) = l {
            prev[graph.factor_edges(f)[0]] = *g;
        }
    }
    let mut trace = Vec::new();
    let beliefs_of = |msgs: &[GaussianMsg]| -> Vec<GaussianMsg> {
        (0..graph.n_vars()).map(|v| sum_into(graph, v, None, msgs)).collect()
    };
    observer(0, &beliefs_of(&prev));
    for t in 1..=opts.iterations {
        let compute = |e: EdgeId| -> GaussianMsg {
            let edge = graph.edges()[e];
            let m = match &local[edge.factor] {
                Local::Unary(g) => *g,
                Local::Binary { a, b, mean, var } => {
                    if edge.var == *b {
                        sum_into(graph, *a, Some(edge.factor), &prev).add_independent(*mean, *var)
                    } else {
                        sum_into(graph, *b, Some(edge.factor), &prev).add_independent(-*mean, *var)
                    }
                }
            };
            if opts.damping > 0.0 {
                m.mix(&prev[e], opts.damping)
            } else {
                m
            }
        };
        let next: Vec<GaussianMsg> = if opts.parallel {
            (0..n_edges).into_par_iter().map(compute).collect()
        } else {
            (0..n_edges).map(compute).collect()
        };
        prev = next;
        let beliefs = beliefs_of(&prev);
        if opts.record_trace {
            trace.push(beliefs.iter().map(|b| (b.mean(), b.var())).collect());
        }
        observer(t, &beliefs);
    }
    let beliefs = beliefs_of(&prev);
    if let Some(v) = beliefs.iter().position(|b| b.is_vague()) {
        return Err(GbpError::AllVague(v));
    }
    Ok(GbpRun {
        beliefs,
        trace,
        messages: prev,
    })
}

/// Same columns as the discretized trace; `skew`, `exkurt` and `eps` are 0
/// and there is no `kl_gauss` column.
pub fn write_gbp_trace_csv<W: Write>(run: &GbpRun, mut w: W) -> io::Result<()> {
    writeln!(w, "iteration,variable,mu,var,skew,exkurt,eps")?;
    for (i, row) in run.trace.iter().enumerate() {
        for (v, (mu, var)) in row.iter().enumerate() {
            writeln!(w, "{},{},{},{},0,0,0", i + 1, v, mu, var)?;
        }
    }
    Ok(())
}

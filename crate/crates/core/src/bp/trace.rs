use std::io::{self, Write};

use rayon::prelude::*;
use thiserror::Error;

use super::BeliefSet;
use crate::dist::{cumulants, CumulantSummary};

/// What `run_sync` records per iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceLevel {
    /// Only the largest belief change.
    Deltas,
    /// Belief change plus a cumulant summary of every belief.
    Summaries,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BpTrace {
    level: TraceLevel,
    /// `deltas[t - 1]`: max over variables of the L∞ belief change at iteration `t`.
    pub deltas: Vec<f64>,
    /// `summaries[t - 1][v]`, empty at [`TraceLevel::Deltas`].
    pub summaries: Vec<Vec<Option<CumulantSummary>>>,
}

impl BpTrace {
    pub(super) fn new(level: TraceLevel) -> Self {
        BpTrace {
            level,
            deltas: Vec::new(),
            summaries: Vec::new(),
        }
    }

    pub(super) fn record(&mut self, old: &BeliefSet, new: &BeliefSet, parallel: bool) {
        self.deltas.push(new.max_linf(old));
        if self.level == TraceLevel::Summaries {
            let s = if parallel {
                new.beliefs.par_iter().map(|b| cumulants(b).ok()).collect()
            } else {
                new.beliefs.iter().map(|b| cumulants(b).ok()).collect()
            };
            self.summaries.push(s);
        }
    }

    pub fn iterations(&self) -> usize {
        self.deltas.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("beliefs did not settle below the tolerance")]
pub struct NotConverged;

/// First iteration whose largest belief change is below `tol`.
pub fn convergence_check(trace: &BpTrace, tol: f64) -> Result<usize, NotConverged> {
    if !(tol > 0.0) {
        return Err(NotConverged);
    }
    trace
        .deltas
        .iter()
        .position(|d| *d < tol)
        .map(|i| i + 1)
        .ok_or(NotConverged)
}

fn num(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else {
        format!("{x}")
    }
}

/// Columns `iteration,variable,mu,var,skew,exkurt,eps,kl_gauss`. Degenerate
/// beliefs are written as `NaN`.
pub fn write_trace_csv<W: Write>(trace: &BpTrace, mut w: W) -> io::Result<()> {
    writeln!(w, "iteration,variable,mu,var,skew,exkurt,eps,kl_gauss")?;
    for (i, row) in trace.summaries.iter().enumerate() {
        for (v, s) in row.iter().enumerate() {
            let vals = match s {
                Some(s) => [s.mu, s.var, s.skew, s.exkurt, s.eps, s.kl_gauss],
                None => [f64::NAN; 6],
            };
            let cols: Vec<String> = vals.iter().map(|x| num(*x)).collect();
            writeln!(w, "{},{},{}", i + 1, v, cols.join(","))?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trace(deltas: Vec<f64>) -> BpTrace {
        BpTrace {
            level: TraceLevel::Deltas,
            deltas,
            summaries: vec![],
        }
    }

    #[test]
    fn convergence_index() {
        let t = trace(vec![0.5, 0.1, 1e-9, 0.0]);
        assert_eq!(convergence_check(&t, 1e-6), Ok(3));
        assert_eq!(convergence_check(&t, 0.0), Err(NotConverged));
        assert_eq!(convergence_check(&trace(vec![1.0]), 0.5), Err(NotConverged));
    }
}

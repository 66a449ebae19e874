//! Prior-width sweep on a chain and degree sweep on a star.

use bpclt_core::bp::{run_sync, BpOptions};
use bpclt_core::dist::DistError;
use bpclt_core::gbp::{gbp_run_sync, GbpError, GbpOptions};
use bpclt_core::graph::PriorSpec;
use serde_json::json;

use super::topology::{chain, star};
use super::{summary_or_nan, SeedOutput};
use crate::config::{DegreeSweepParams, PriorSweepParams};
use crate::table::Table;
use crate::{RunError, SeedContext};

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = xs.filter(|x| x.is_finite()).collect();
    if v.is_empty() {
        f64::NAN
    } else {
        v.iter().sum::<f64>() / v.len() as f64
    }
}

/// One row per box width: prior variance, anchoring ratio `R`, and final
/// belief statistics over all variables and for the last variable.
pub fn prior_sweep(p: &PriorSweepParams, seed: u64) -> Result<SeedOutput, RunError> {
    let mut cols = vec!["prior_var", "r"];
    if p.engine.bp() {
        cols.extend(["kl_mean", "kl_max", "kl_last", "eps_mean", "eps_last", "bp_var_mean"]);
    }
    if p.engine.gbp() {
        cols.push("gbp_var_mean");
    }
    let mut table = Table::new(&["width"], &cols);
    let vars: Vec<usize> = (0..p.n_vars).collect();
    let step = p.grid.step();
    let kernels = p.kernel.spec(seed).kernels(p.n_vars - 1).seed(seed)?;
    let kernel_var = mean(kernels.iter().map(|k| k.var_bins() * step * step));
    for w in p.widths.values() {
        let prior = PriorSpec::Box { width_bins: w };
        let graph = chain(p.n_vars, &vars, p.grid, &p.kernel, &prior, seed)?;
        let prior_var = prior
            .materialize(p.grid, &mut super::prior_rng(seed))
            .seed(seed)?
            .variance();
        let mut row = vec![prior_var, prior_var / kernel_var];
        if p.engine.bp() {
            let run = run_sync(&graph, BpOptions::new(p.iterations)).seed(seed)?;
            let s: Vec<_> = run.beliefs.iter().map(summary_or_nan).collect();
            let last = s[p.n_vars - 1];
            row.extend([
                mean(s.iter().map(|s| s.kl_gauss)),
                s.iter()
                    .map(|s| s.kl_gauss)
                    .filter(|x| x.is_finite())
                    .fold(f64::NAN, f64::max),
                last.kl_gauss,
                mean(s.iter().map(|s| s.eps)),
                last.eps,
                mean(s.iter().map(|s| s.var)),
            ]);
        }
        if p.engine.gbp() {
            // a one-bin box has no Gaussian projection
            match gbp_run_sync(&graph, GbpOptions::new(p.iterations)) {
                Ok(run) => row.push(mean(run.beliefs.iter().map(|g| g.var()))),
                Err(GbpError::Dist(DistError::DegenerateVariance(_))) => row.push(f64::NAN),
                Err(e) => return Err(e).seed(seed),
            }
        }
        table.push(vec![w.to_string()], row);
    }
    Ok(SeedOutput::plain(seed, table, json!({ "kernel_var": kernel_var })))
}

/// One row per degree: statistics of the centre belief of a star whose
/// outer variables carry the priors. Degree `N + 1` reuses the priors and
/// kernels of degree `N` and adds one more.
pub fn degree_sweep(p: &DegreeSweepParams, seed: u64) -> Result<SeedOutput, RunError> {
    let mut table = Table::new(&["degree"], &["eps", "kl_gauss", "skew", "exkurt", "var"]);
    for n in p.degrees.values() {
        let graph = star(n, p.grid, &p.kernel, &p.prior, seed)?;
        let run = run_sync(&graph, BpOptions::new(p.iterations)).seed(seed)?;
        let s = summary_or_nan(run.beliefs.get(0));
        table.push(vec![n.to_string()], vec![s.eps, s.kl_gauss, s.skew, s.exkurt, s.var]);
    }
    Ok(SeedOutput::plain(seed, table, json!({})))
}

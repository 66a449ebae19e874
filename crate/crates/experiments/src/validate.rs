use bpclt_core::dist::Grid;
use bpclt_core::graph::PriorSpec;
use bpclt_stereo::middlebury::has_middlebury_layout;

use crate::config::*;
use crate::experiments::topology::build_topology;

type Issues = Vec<(String, String)>;

fn push(out: &mut Issues, field: &str, msg: impl Into<String>) {
    out.push((field.to_string(), msg.into()));
}

fn check_kernel(out: &mut Issues, k: &KernelTemplate, grid: Grid) {
    match k {
        KernelTemplate::RandomNoise { width_bins } => {
            if *width_bins == 0 || *width_bins > grid.n_bins() {
                push(
                    out,
                    "width_bins",
                    format!("kernel width must be in 1..={}, got {width_bins}", grid.n_bins()),
                );
            }
        }
        KernelTemplate::Gaussian {
            sigma_bins,
            truncate_sigmas,
        } => {
            if !(*sigma_bins > 0.0) || !(*truncate_sigmas > 0.0) {
                push(
                    out,
                    "sigma_bins",
                    "gaussian kernel needs sigma_bins > 0 and truncate_sigmas > 0",
                );
            }
        }
        KernelTemplate::GammaShaped { shape, scale_bins, len } => {
            if !(*shape > 0.0) || !(*scale_bins > 0.0) || *len == 0 {
                push(
                    out,
                    "shape",
                    "gamma kernel needs shape > 0, scale_bins > 0 and len >= 1",
                );
            }
        }
        KernelTemplate::Fixed { kernel } => {
            let span = kernel.offsets().last().unwrap_or(&0) - kernel.offsets().first().unwrap_or(&0);
            if span as usize >= grid.n_bins() {
                push(
                    out,
                    "offsets",
                    format!("kernel spans {} bins, grid has {}", span + 1, grid.n_bins()),
                );
            }
        }
    }
}

fn check_prior(out: &mut Issues, p: &PriorSpec, grid: Grid) {
    let n = grid.n_bins();
    match p {
        PriorSpec::RandomNoise { width_bins } | PriorSpec::Box { width_bins } => {
            if *width_bins == 0 || *width_bins > n {
                push(
                    out,
                    "prior",
                    format!("prior width must be in 1..={n}, got {width_bins}"),
                );
            }
        }
        PriorSpec::Delta { bin } => {
            if *bin >= n {
                push(out, "prior", format!("delta bin {bin} outside grid of {n} bins"));
            }
        }
        PriorSpec::Gaussian { var, .. } => {
            if !(*var > 0.0) {
                push(out, "prior", "gaussian prior needs var > 0");
            }
        }
        PriorSpec::Uniform => {}
    }
}

fn check_schedule(out: &mut Issues, s: &Schedule, tree: bool) {
    match s {
        Schedule::Exact if !tree => push(out, "schedule", "exact schedule needs a singly connected graph"),
        Schedule::Exact => {}
        Schedule::Sync { iterations, damping } => {
            if *iterations < 1 {
                push(out, "iterations", "must be >= 1");
            }
            if !(0.0..1.0).contains(damping) {
                push(out, "damping", format!("must be in [0, 1), got {damping}"));
            }
        }
    }
}

fn check_vars(out: &mut Issues, vars: &Option<Vec<usize>>, n: usize) {
    if let Some(v) = vars {
        if let Some(bad) = v.iter().find(|v| **v >= n) {
            push(
                out,
                "prior_vars",
                format!("variable {bad} out of range for {n} variables"),
            );
        }
    }
}

fn check_list(out: &mut Issues, field: &str, list: &IntList, min: usize, max: Option<usize>) {
    let vals = list.values();
    if vals.is_empty() {
        push(out, field, "must not be empty");
    }
    if let Some(bad) = vals.iter().find(|v| **v < min || max.is_some_and(|m| **v > m)) {
        let range = max.map_or(format!(">= {min}"), |m| format!("in {min}..={m}"));
        push(out, field, format!("value {bad} must be {range}"));
    }
}

/// All problems in `cfg`, as `(field, message)`.
pub fn validate(cfg: &ExperimentConfig) -> Issues {
    let mut out = Issues::new();
    if cfg.name.is_empty() || cfg.name.contains(['/', '\\']) || cfg.name.starts_with('.') {
        push(
            &mut out,
            "name",
            format!("{:?} is not usable as a directory name", cfg.name),
        );
    }
    if cfg.seeds.is_empty() {
        push(
            &mut out,
            "seeds",
            format!(
                "seed range is empty (first {} > last {})",
                cfg.seeds.first, cfg.seeds.last
            ),
        );
    }
    match &cfg.experiment {
        Experiment::Chain(p) => {
            if p.n_vars < 2 {
                push(&mut out, "n_vars", "chain needs >= 2 variables");
            }
            check_vars(&mut out, &p.prior_vars, p.n_vars);
            check_kernel(&mut out, &p.kernel, p.grid);
            check_prior(&mut out, &p.prior, p.grid);
            check_schedule(&mut out, &p.schedule, true);
        }
        Experiment::Tree(p) => {
            if p.depth < 1 {
                push(&mut out, "depth", "must be >= 1");
            }
            if p.branching < 2 {
                push(&mut out, "branching", "must be >= 2");
            }
            if (p.branching as f64).powi(p.depth as i32 + 1) > 1e6 {
                push(&mut out, "depth", "tree would exceed 10^6 variables");
            }
            check_kernel(&mut out, &p.kernel, p.grid);
            check_prior(&mut out, &p.prior, p.grid);
            check_schedule(&mut out, &p.schedule, true);
        }
        Experiment::Star(p) => {
            if p.n_outer < 2 {
                push(&mut out, "n_outer", "star needs >= 2 outer variables");
            }
            check_kernel(&mut out, &p.kernel, p.grid);
            check_prior(&mut out, &p.prior, p.grid);
            check_schedule(&mut out, &p.schedule, true);
        }
        Experiment::Grid(p) => {
            if p.rows * p.cols < 2 {
                push(&mut out, "rows", "grid needs >= 2 cells");
            }
            check_vars(&mut out, &p.prior_vars, p.rows * p.cols);
            check_kernel(&mut out, &p.kernel, p.grid);
            check_prior(&mut out, &p.prior, p.grid);
            check_schedule(&mut out, &p.schedule, p.rows == 1 || p.cols == 1);
        }
        Experiment::PriorSweep(p) => {
            if p.n_vars < 2 {
                push(&mut out, "n_vars", "chain needs >= 2 variables");
            }
            check_list(&mut out, "widths", &p.widths, 1, Some(p.grid.n_bins()));
            check_kernel(&mut out, &p.kernel, p.grid);
            if p.iterations < 1 {
                push(&mut out, "iterations", "must be >= 1");
            }
        }
        Experiment::DegreeSweep(p) => {
            check_list(&mut out, "degrees", &p.degrees, 2, None);
            check_kernel(&mut out, &p.kernel, p.grid);
            check_prior(&mut out, &p.prior, p.grid);
            if p.iterations < 1 {
                push(&mut out, "iterations", "must be >= 1");
            }
        }
        Experiment::ConvergenceRate(p) => {
            if p.max_depth < bpclt_core::theory::MIN_MAX_DEPTH {
                push(
                    &mut out,
                    "max_depth",
                    format!("rate fits need max_depth >= {}", bpclt_core::theory::MIN_MAX_DEPTH),
                );
            }
            check_kernel(&mut out, &p.kernel, p.grid);
            check_prior(&mut out, &p.prior, p.grid);
        }
        Experiment::TreeEquivalence(p) => {
            let n = p.graph.n_vars();
            match p.graph {
                LoopyGraph::Cycle { n } if n < 3 => push(&mut out, "graph", "cycle needs >= 3 variables"),
                LoopyGraph::Grid { rows, cols } if rows < 2 || cols < 2 => {
                    push(&mut out, "graph", "grid needs rows, cols >= 2 to contain a cycle")
                }
                _ => {}
            }
            check_vars(&mut out, &Some(p.prior_vars.clone()), n);
            if let Some(r) = &p.roots {
                if let Some(bad) = r.iter().find(|r| **r >= n) {
                    push(&mut out, "roots", format!("root {bad} out of range for {n} variables"));
                }
            }
            check_list(&mut out, "iterations", &p.iterations, 1, None);
            check_kernel(&mut out, &p.kernel, p.grid);
            check_prior(&mut out, &p.prior, p.grid);
        }
        Experiment::Stereo(p) => {
            for (field, msg) in p.stereo.issues() {
                push(&mut out, field, msg);
            }
            if p.size.contains(&0) || p.full_scale_size.contains(&0) {
                push(&mut out, "size", "image sizes must be positive");
            }
            if p.full_scale_iterations < 1 {
                push(&mut out, "full_scale_iterations", "must be >= 1");
            }
            if let StereoSource::Middlebury { dir, gt_scale } = &p.source {
                if !has_middlebury_layout(dir) {
                    push(&mut out, "dir", format!("no stereo pair found in {}", dir.display()));
                }
                if gt_scale.is_some_and(|s| !(s > 0.0)) {
                    push(&mut out, "gt_scale", "must be > 0");
                }
            }
        }
    }
    if out.is_empty() && !cfg.seeds.is_empty() {
        // builder preconditions not covered above
        if let Some(Err(e)) = build_topology(&cfg.experiment, cfg.seeds.first) {
            push(&mut out, "experiment", e.to_string());
        }
    }
    out
}

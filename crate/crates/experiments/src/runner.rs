//! Runs every seed of a config and writes the artifacts.
//!
//! Layout under `<out>/<name>/`: `seed_<s>.csv` per seed, `aggregate.csv`
//! (mean and sample standard deviation across seeds, row by row),
//! `manifest.json`, and for experiments with extra artifacts a `seed_<s>/`
//! directory.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde_json::json;

use crate::config::ExperimentConfig;
use crate::experiments::{run_seed, SeedOutput};
use crate::table::Table;
use crate::RunError;

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub out_dir: PathBuf,
    /// Worker threads; `None` uses rayon's default.
    pub threads: Option<usize>,
    /// Use the full-size stereo settings.
    pub full_scale: bool,
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub dir: PathBuf,
    pub outputs: Vec<SeedOutput>,
    pub aggregate: Table,
    pub wall_time_s: f64,
}

/// Writes through a sibling temporary file so readers never see a partial
/// artifact.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), RunError> {
    let io = |source| RunError::Io {
        path: path.to_path_buf(),
        source,
    };
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(io)?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    let mut f = fs::File::create(&tmp).map_err(io)?;
    f.write_all(bytes).map_err(io)?;
    f.sync_all().map_err(io)?;
    fs::rename(&tmp, path).map_err(io)
}

fn write_seed(dir: &Path, out: &SeedOutput) -> Result<(), RunError> {
    write_atomic(&dir.join(format!("seed_{}.csv", out.seed)), out.csv.to_csv().as_bytes())?;
    let sub = dir.join(format!("seed_{}", out.seed));
    for (rel, bytes) in &out.files {
        write_atomic(&sub.join(rel), bytes)?;
    }
    Ok(())
}

pub fn run_config(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<RunSummary, RunError> {
    let start = Instant::now();
    let dir = opts.out_dir.join(&cfg.name);
    fs::create_dir_all(&dir).map_err(|source| RunError::Io {
        path: dir.clone(),
        source,
    })?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.threads.unwrap_or(0))
        .build()
        .map_err(|e| RunError::Pool(e.to_string()))?;
    let seeds = cfg.seeds.seeds();
    let outputs = pool.install(|| {
        seeds
            .par_iter()
            .map(|&seed| {
                let out = run_seed(&cfg.experiment, seed, opts.full_scale)?;
                write_seed(&dir, &out)?;
                Ok(out)
            })
            .collect::<Result<Vec<_>, RunError>>()
    })?;
    let summaries: Vec<Table> = outputs.iter().map(|o| o.summary.clone()).collect();
    let aggregate = Table::aggregate(&summaries);
    write_atomic(&dir.join("aggregate.csv"), aggregate.to_csv().as_bytes())?;
    let wall_time_s = start.elapsed().as_secs_f64();
    let manifest = json!({
        "name": cfg.name,
        "kind": cfg.experiment.kind(),
        "version": env!("CARGO_PKG_VERSION"),
        "threads": pool.current_num_threads(),
        "full_scale": opts.full_scale,
        "wall_time_s": wall_time_s,
        "seeds": seeds,
        "config": cfg,
        "results": outputs.iter().map(|o| json!({ "seed": o.seed, "result": o.extra })).collect::<Vec<_>>(),
    });
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n";
    write_atomic(&dir.join("manifest.json"), text.as_bytes())?;
    Ok(RunSummary {
        dir,
        outputs,
        aggregate,
        wall_time_s,
    })
}

//! Experiment configuration files.
//!
//! A config is a JSON object with a `name`, an inclusive `seeds` range and an
//! `experiment` object whose `kind` selects the parameters. Unknown fields
//! are rejected so typos surface as validation errors.

use std::path::{Path, PathBuf};

use bpclt_core::dist::{Grid, Kernel};
use bpclt_core::graph::{KernelSpec, PriorSpec};
use bpclt_stereo::StereoConfig;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub seeds: SeedRange,
    pub experiment: Experiment,
}

/// Inclusive seed range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeedRange {
    pub first: u64,
    pub last: u64,
}

impl SeedRange {
    pub fn seeds(&self) -> Vec<u64> {
        (self.first..=self.last).collect()
    }

    pub fn len(&self) -> usize {
        if self.last < self.first {
            0
        } else {
            (self.last - self.first + 1) as usize
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Experiment {
    Chain(ChainParams),
    Tree(TreeParams),
    Star(StarParams),
    Grid(GridParams),
    PriorSweep(PriorSweepParams),
    DegreeSweep(DegreeSweepParams),
    ConvergenceRate(RateParams),
    TreeEquivalence(EquivalenceParams),
    Stereo(StereoParams),
}

impl Experiment {
    pub fn kind(&self) -> &'static str {
        match self {
            Experiment::Chain(_) => "chain",
            Experiment::Tree(_) => "tree",
            Experiment::Star(_) => "star",
            Experiment::Grid(_) => "grid",
            Experiment::PriorSweep(_) => "prior-sweep",
            Experiment::DegreeSweep(_) => "degree-sweep",
            Experiment::ConvergenceRate(_) => "convergence-rate",
            Experiment::TreeEquivalence(_) => "tree-equivalence",
            Experiment::Stereo(_) => "stereo",
        }
    }
}

/// Kernel family; random kernels take their seed from the run seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum KernelTemplate {
    RandomNoise {
        width_bins: usize,
    },
    Gaussian {
        sigma_bins: f64,
        #[serde(default = "four")]
        truncate_sigmas: f64,
    },
    GammaShaped {
        shape: f64,
        scale_bins: f64,
        len: usize,
    },
    /// Explicit `{"offsets": [...], "weights": [...]}` used on every factor.
    Fixed {
        kernel: Kernel,
    },
}

fn four() -> f64 {
    4.0
}

impl KernelTemplate {
    pub fn spec(&self, seed: u64) -> KernelSpec {
        match self {
            KernelTemplate::RandomNoise { width_bins } => KernelSpec::RandomNoise {
                width_bins: *width_bins,
                seed,
            },
            KernelTemplate::Gaussian {
                sigma_bins,
                truncate_sigmas,
            } => KernelSpec::Gaussian {
                sigma_bins: *sigma_bins,
                truncate_sigmas: *truncate_sigmas,
            },
            KernelTemplate::GammaShaped { shape, scale_bins, len } => KernelSpec::GammaShaped {
                shape: *shape,
                scale_bins: *scale_bins,
                len: *len,
            },
            KernelTemplate::Fixed { kernel } => KernelSpec::Fixed { kernel: kernel.clone() },
        }
    }

    pub fn width(&self) -> Option<usize> {
        match self {
            KernelTemplate::RandomNoise { width_bins } => Some(*width_bins),
            KernelTemplate::GammaShaped { len, .. } => Some(*len),
            KernelTemplate::Fixed { kernel } => Some(kernel.len()),
            KernelTemplate::Gaussian { .. } => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Schedule {
    /// Two-pass schedule; trees only.
    Exact,
    Sync {
        iterations: usize,
        #[serde(default)]
        damping: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EngineChoice {
    #[default]
    Bp,
    Gbp,
    Both,
}

impl EngineChoice {
    pub fn bp(self) -> bool {
        matches!(self, EngineChoice::Bp | EngineChoice::Both)
    }

    pub fn gbp(self) -> bool {
        matches!(self, EngineChoice::Gbp | EngineChoice::Both)
    }
}

/// Either an explicit list or an inclusive `{from, to}` range.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum IntList {
    List(Vec<usize>),
    Range { from: usize, to: usize },
}

impl IntList {
    pub fn values(&self) -> Vec<usize> {
        match self {
            IntList::List(v) => v.clone(),
            IntList::Range { from, to } => (*from..=*to).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainParams {
    pub n_vars: usize,
    /// Defaults to both ends.
    #[serde(default)]
    pub prior_vars: Option<Vec<usize>>,
    pub grid: Grid,
    pub kernel: KernelTemplate,
    pub prior: PriorSpec,
    pub schedule: Schedule,
    #[serde(default)]
    pub engine: EngineChoice,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TreeParams {
    pub depth: usize,
    pub branching: usize,
    pub grid: Grid,
    pub kernel: KernelTemplate,
    /// Attached to every leaf.
    pub prior: PriorSpec,
    pub schedule: Schedule,
    #[serde(default)]
    pub engine: EngineChoice,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StarParams {
    pub n_outer: usize,
    pub grid: Grid,
    pub kernel: KernelTemplate,
    /// Attached to every outer variable.
    pub prior: PriorSpec,
    pub schedule: Schedule,
    #[serde(default)]
    pub engine: EngineChoice,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridParams {
    pub rows: usize,
    pub cols: usize,
    /// Defaults to variable 0.
    #[serde(default)]
    pub prior_vars: Option<Vec<usize>>,
    pub grid: Grid,
    pub kernel: KernelTemplate,
    pub prior: PriorSpec,
    pub schedule: Schedule,
    #[serde(default)]
    pub engine: EngineChoice,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PriorSweepParams {
    pub n_vars: usize,
    /// Box prior widths in bins; a box prior sits on every variable.
    pub widths: IntList,
    pub grid: Grid,
    pub kernel: KernelTemplate,
    pub iterations: usize,
    #[serde(default = "both")]
    pub engine: EngineChoice,
}

fn both() -> EngineChoice {
    EngineChoice::Both
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DegreeSweepParams {
    pub degrees: IntList,
    pub grid: Grid,
    pub kernel: KernelTemplate,
    pub prior: PriorSpec,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RateParams {
    /// Chain of `max_depth + 1` variables with the prior on variable 0.
    pub max_depth: usize,
    pub grid: Grid,
    pub kernel: KernelTemplate,
    pub prior: PriorSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum LoopyGraph {
    Cycle { n: usize },
    Grid { rows: usize, cols: usize },
}

impl LoopyGraph {
    pub fn n_vars(&self) -> usize {
        match self {
            LoopyGraph::Cycle { n } => *n,
            LoopyGraph::Grid { rows, cols } => rows * cols,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EquivalenceParams {
    pub graph: LoopyGraph,
    pub grid: Grid,
    pub kernel: KernelTemplate,
    pub prior: PriorSpec,
    pub prior_vars: Vec<usize>,
    pub iterations: IntList,
    /// Defaults to every variable.
    #[serde(default)]
    pub roots: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum StereoSource {
    /// Seeded synthetic scene; the run seed picks the texture.
    Synthetic,
    /// Middlebury-style directory, relative paths resolved against the
    /// config file.
    Middlebury {
        dir: PathBuf,
        #[serde(default)]
        gt_scale: Option<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StereoParams {
    pub source: StereoSource,
    /// `[height, width]` of the default run.
    #[serde(default = "desk_size")]
    pub size: [usize; 2],
    /// `[height, width]` with `--full-scale`.
    #[serde(default = "full_size")]
    pub full_scale_size: [usize; 2],
    #[serde(default = "full_iterations")]
    pub full_scale_iterations: usize,
    #[serde(default)]
    pub stereo: StereoConfig,
}

fn desk_size() -> [usize; 2] {
    [50, 60]
}

fn full_size() -> [usize; 2] {
    [150, 200]
}

fn full_iterations() -> usize {
    2000
}

/// A config problem, with the 1-based line of the offending key when it can
/// be found in the source text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Issue {
    pub line: Option<usize>,
    pub field: String,
    pub message: String,
}

impl std::fmt::Display for Issue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}: {}", self.field, self.message),
            None => write!(f, "{}: {}", self.field, self.message),
        }
    }
}

/// First line containing `"key"` for the last dotted component of `field`.
pub fn line_of(text: &str, field: &str) -> Option<usize> {
    let key = format!("\"{}\"", field.rsplit('.').next().unwrap_or(field));
    text.lines().position(|l| l.contains(&key)).map(|i| i + 1)
}

/// Parses config text. Syntax and schema errors carry serde's line number.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, Vec<Issue>> {
    serde_json::from_str(text).map_err(|e| {
        vec![Issue {
            line: Some(e.line()).filter(|l| *l > 0),
            field: "config".into(),
            message: e.to_string(),
        }]
    })
}

/// Reads and checks a config file; relative stereo directories are resolved
/// against the config's directory.
pub fn load_config(path: &Path) -> Result<ExperimentConfig, Vec<Issue>> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        vec![Issue {
            line: None,
            field: "config".into(),
            message: format!("cannot read {}: {e}", path.display()),
        }]
    })?;
    let mut cfg = parse_config(&text)?;
    if let Experiment::Stereo(StereoParams {
        source: StereoSource::Middlebury { dir, .. },
        ..
    }) = &mut cfg.experiment
    {
        if dir.is_relative() {
            if let Some(parent) = path.parent() {
                *dir = parent.join(&*dir);
            }
        }
    }
    let issues = crate::validate::validate(&cfg);
    if issues.is_empty() {
        Ok(cfg)
    } else {
        Err(issues
            .into_iter()
            .map(|(field, message)| Issue {
                line: line_of(&text, &field),
                field,
                message,
            })
            .collect())
    }
}

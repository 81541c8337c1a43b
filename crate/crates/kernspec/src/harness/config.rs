//! Experiment configuration: TOML schema, validation and resolution.
//!
//! `validate` reports every resolved default and every problem without
//! running anything; error messages always name the offending field.

use crate::data::{self, Dataset};
use crate::kernels::{Bandwidth, KernelFamily, KernelSpec};
use crate::linalg::PermutationStrategy;
use crate::targets::{TargetKind, TargetSpec};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

use super::HarnessError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    DimSweep,
    RbfRankReg,
    TopVsTrailing,
    MultiKernelCompare,
    CumulativeTargets,
    ResampleVolatility,
    KernelTable,
}

impl ExperimentKind {
    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::DimSweep => "dim-sweep",
            ExperimentKind::RbfRankReg => "rbf-rank-reg",
            ExperimentKind::TopVsTrailing => "top-vs-trailing",
            ExperimentKind::MultiKernelCompare => "multi-kernel-compare",
            ExperimentKind::CumulativeTargets => "cumulative-targets",
            ExperimentKind::ResampleVolatility => "resample-volatility",
            ExperimentKind::KernelTable => "kernel-table",
        }
    }
}

/// Kernel scale: a number, or resolved against the feature dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScaleSpec {
    Named(String),
    Fixed(f64),
}

impl Default for ScaleSpec {
    fn default() -> Self {
        ScaleSpec::Named("sqrt-dim".into())
    }
}

impl ScaleSpec {
    /// Resolves to a concrete scale for feature dimension `p`.
    pub fn resolve(&self, p: usize) -> Result<f64, String> {
        match self {
            ScaleSpec::Fixed(v) => Ok(*v),
            ScaleSpec::Named(name) => match name.as_str() {
                "dim" => Ok(p as f64),
                "sqrt-dim" => Ok((p as f64).sqrt()),
                other => Err(format!(
                    "kernel.scale: unknown symbolic scale {other:?} (expected \"dim\", \"sqrt-dim\" or a number)"
                )),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BandwidthSpec {
    Named(String),
    Fixed(f64),
}

impl Default for BandwidthSpec {
    fn default() -> Self {
        BandwidthSpec::Named("median".into())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelConfig {
    pub family: KernelFamily,
    #[serde(default)]
    pub scale: ScaleSpec,
    #[serde(default)]
    pub bandwidth: BandwidthSpec,
    #[serde(default = "default_diag_value")]
    pub diag_value: f64,
}

fn default_diag_value() -> f64 {
    500.0
}

impl KernelConfig {
    pub fn of_family(family: KernelFamily) -> Self {
        Self {
            family,
            scale: ScaleSpec::default(),
            bandwidth: BandwidthSpec::default(),
            diag_value: default_diag_value(),
        }
    }

    fn validate(&self, field: &str, errors: &mut Vec<String>) {
        match &self.scale {
            ScaleSpec::Fixed(v) if !(*v > 0.0) => {
                errors.push(format!("{field}.scale: must be positive, got {v}"));
            }
            ScaleSpec::Named(name) if name != "dim" && name != "sqrt-dim" => {
                errors.push(format!(
                    "{field}.scale: unknown symbolic scale {name:?} (expected \"dim\", \"sqrt-dim\" or a number)"
                ));
            }
            _ => {}
        }
        match &self.bandwidth {
            BandwidthSpec::Fixed(v) if !(*v > 0.0) => {
                errors.push(format!("{field}.bandwidth: must be positive, got {v}"));
            }
            BandwidthSpec::Named(name) if name != "median" => {
                errors.push(format!(
                    "{field}.bandwidth: unknown value {name:?} (expected \"median\" or a number)"
                ));
            }
            _ => {}
        }
        if !(self.diag_value > 0.0) {
            errors.push(format!(
                "{field}.diag_value: must be positive, got {}",
                self.diag_value
            ));
        }
    }

    /// Resolves to a library [`KernelSpec`] for feature dimension `p`.
    pub fn resolve(&self, p: usize) -> Result<KernelSpec, HarnessError> {
        let scale = self
            .scale
            .resolve(p)
            .map_err(HarnessError::Config)?;
        let bandwidth = match &self.bandwidth {
            BandwidthSpec::Fixed(v) => Bandwidth::Fixed(*v),
            BandwidthSpec::Named(_) => Bandwidth::MedianHeuristic,
        };
        Ok(KernelSpec {
            family: self.family,
            scale,
            bandwidth,
            diag_value: self.diag_value,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetConfig {
    pub kind: String,
    /// Row count for synthetic sources.
    pub n: Option<usize>,
    /// Feature dimension for `synth-gaussian`.
    pub p: Option<usize>,
    pub low: Option<f64>,
    pub high: Option<f64>,
    /// Image side length for `synth-binary-images`.
    pub side: Option<usize>,
    pub class_a: Option<f64>,
    pub class_b: Option<f64>,
    pub images: Option<PathBuf>,
    pub labels: Option<PathBuf>,
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub has_label_column: bool,
    #[serde(default)]
    pub skip_header: bool,
    /// Keep raw 0-255 pixel values instead of scaling to [0, 1].
    #[serde(default)]
    pub raw_pixels: bool,
    /// Binary class filter applied after loading; labels map to -1/+1.
    pub filter_classes: Option<[f64; 2]>,
    /// Optional seeded cap on the dataset size, applied after filtering.
    pub sample_size: Option<usize>,
}

impl DatasetConfig {
    fn synthetic_default(kind: &str, n: usize) -> Self {
        Self {
            kind: kind.into(),
            n: Some(n),
            p: None,
            low: None,
            high: None,
            side: None,
            class_a: None,
            class_b: None,
            images: None,
            labels: None,
            path: None,
            has_label_column: false,
            skip_header: false,
            raw_pixels: false,
            filter_classes: None,
            sample_size: None,
        }
    }

    /// Row count when it is known without touching the filesystem.
    pub fn static_size(&self) -> Option<usize> {
        match self.kind.as_str() {
            "synth-uniform" | "synth-gaussian" | "synth-binary-images" => {
                let n = self.n?;
                Some(self.sample_size.map_or(n, |s| s.min(n)))
            }
            _ => None,
        }
    }

    fn validate(&self, errors: &mut Vec<String>, notes: &mut Vec<String>) {
        match self.kind.as_str() {
            "synth-uniform" => {
                if self.n.is_none() {
                    notes.push("dataset.n = 1000 (default)".into());
                }
                let low = self.low.unwrap_or(-3.0);
                let high = self.high.unwrap_or(3.0);
                if self.low.is_none() || self.high.is_none() {
                    notes.push(format!("dataset.low/high = ({low}, {high}) (default)"));
                }
                if low >= high {
                    errors.push(format!(
                        "dataset.low/high: empty range ({low} >= {high})"
                    ));
                }
            }
            "synth-gaussian" => {
                if self.n.is_none() {
                    notes.push("dataset.n = 400 (default)".into());
                }
                if self.p.is_none() {
                    notes.push("dataset.p chosen per sweep cell".into());
                }
            }
            "synth-binary-images" => {
                if self.n.is_none() {
                    notes.push("dataset.n = 200 (default)".into());
                }
                if self.side.is_none() {
                    notes.push("dataset.side = 28 (default)".into());
                }
            }
            "idx" => {
                match &self.images {
                    None => errors.push("dataset.images: required for kind \"idx\"".into()),
                    Some(p) if !p.exists() => {
                        errors.push(format!("dataset.images: file not found: {}", p.display()))
                    }
                    _ => {}
                }
                match &self.labels {
                    None => errors.push("dataset.labels: required for kind \"idx\"".into()),
                    Some(p) if !p.exists() => {
                        errors.push(format!("dataset.labels: file not found: {}", p.display()))
                    }
                    _ => {}
                }
            }
            "csv" => match &self.path {
                None => errors.push("dataset.path: required for kind \"csv\"".into()),
                Some(p) if !p.exists() => {
                    errors.push(format!("dataset.path: file not found: {}", p.display()))
                }
                _ => {}
            },
            other => errors.push(format!(
                "dataset.kind: unknown kind {other:?} (expected synth-uniform, synth-gaussian, synth-binary-images, idx or csv)"
            )),
        }
        if let Some([a, b]) = self.filter_classes {
            if a == b {
                errors.push(format!(
                    "dataset.filter_classes: classes must differ, both are {a}"
                ));
            }
        }
        if let Some(s) = self.sample_size {
            if s == 0 {
                errors.push("dataset.sample_size: must be at least 1".into());
            }
        }
    }

    /// Loads, filters and caps the dataset.
    pub fn load(&self, seed: u64) -> Result<Dataset, HarnessError> {
        let mut ds = match self.kind.as_str() {
            "synth-uniform" => data::synth_uniform(
                self.n.unwrap_or(1000),
                self.low.unwrap_or(-3.0),
                self.high.unwrap_or(3.0),
                seed,
            )?,
            "synth-gaussian" => data::synth_gaussian(
                self.n.unwrap_or(400),
                self.p
                    .ok_or_else(|| HarnessError::Config("dataset.p: required".into()))?,
                seed,
            ),
            "synth-binary-images" => data::synth_binary_images(
                self.n.unwrap_or(200),
                self.side.unwrap_or(28),
                self.class_a.unwrap_or(4.0),
                self.class_b.unwrap_or(9.0),
                seed,
            ),
            "idx" => data::load_idx_with_options(
                self.images.as_deref().unwrap(),
                self.labels.as_deref().unwrap(),
                !self.raw_pixels,
            )?,
            "csv" => data::load_csv_with_options(
                self.path.as_deref().unwrap(),
                self.has_label_column,
                self.skip_header,
            )?,
            other => {
                return Err(HarnessError::Config(format!(
                    "dataset.kind: unknown kind {other:?}"
                )))
            }
        };
        if let Some([a, b]) = self.filter_classes {
            ds = data::filter_binary(&ds, a, b)?;
        }
        if let Some(cap) = self.sample_size {
            if cap < ds.len() {
                let (sub, _, _) = data::subsample(&ds, cap, seed ^ 0x5eed)?;
                ds = sub;
            }
        }
        Ok(ds)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetConfig {
    pub kind: String,
    pub indices: Option<Vec<usize>>,
    pub weights: Option<Vec<f64>>,
    pub count: Option<usize>,
    pub seed: Option<u64>,
    #[serde(default = "default_scale")]
    pub scale: f64,
    #[serde(default)]
    pub normalize: bool,
}

fn default_scale() -> f64 {
    1.0
}

impl TargetConfig {
    fn validate(&self, field: &str, errors: &mut Vec<String>) {
        match self.kind.as_str() {
            "indexed-combination" => {
                match &self.indices {
                    None => errors.push(format!("{field}.indices: required")),
                    Some(idx) if idx.is_empty() => {
                        errors.push(format!("{field}.indices: must be non-empty"))
                    }
                    Some(idx) if idx.iter().any(|&i| i == 0) => {
                        errors.push(format!("{field}.indices: ranks are 1-based, found 0"))
                    }
                    _ => {}
                }
                if let (Some(i), Some(w)) = (&self.indices, &self.weights) {
                    if i.len() != w.len() {
                        errors.push(format!(
                            "{field}.weights: length {} does not match indices length {}",
                            w.len(),
                            i.len()
                        ));
                    }
                }
                if self.weights.is_none() {
                    errors.push(format!("{field}.weights: required"));
                }
            }
            "cumulative-mean" => {
                if self.count.is_none() {
                    errors.push(format!("{field}.count: required"));
                } else if self.count == Some(0) {
                    errors.push(format!("{field}.count: must be at least 1"));
                }
            }
            "random-weighted" => {
                if self
                    .indices
                    .as_ref()
                    .map(|i| i.is_empty())
                    .unwrap_or(true)
                {
                    errors.push(format!("{field}.indices: required and non-empty"));
                }
            }
            other => errors.push(format!(
                "{field}.kind: unknown kind {other:?} (expected indexed-combination, cumulative-mean or random-weighted)"
            )),
        }
        if !self.scale.is_finite() {
            errors.push(format!("{field}.scale: must be finite"));
        }
    }

    pub fn to_spec(&self, default_seed: u64) -> Result<TargetSpec, HarnessError> {
        let kind = match self.kind.as_str() {
            "indexed-combination" => TargetKind::IndexedCombination {
                indices: self.indices.clone().unwrap_or_default(),
                weights: self.weights.clone().unwrap_or_default(),
            },
            "cumulative-mean" => TargetKind::CumulativeMean {
                count: self.count.unwrap_or(1),
            },
            "random-weighted" => TargetKind::RandomWeighted {
                indices: self.indices.clone().unwrap_or_default(),
                seed: self.seed.unwrap_or(default_seed),
            },
            other => {
                return Err(HarnessError::Config(format!(
                    "targets.kind: unknown kind {other:?}"
                )))
            }
        };
        Ok(TargetSpec {
            kind,
            scale: self.scale,
            normalize: self.normalize,
        })
    }
}

/// One target spec or a list of them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TargetsField {
    One(TargetConfig),
    Many(Vec<TargetConfig>),
}

impl TargetsField {
    pub fn as_vec(&self) -> Vec<TargetConfig> {
        match self {
            TargetsField::One(t) => vec![t.clone()],
            TargetsField::Many(v) => v.clone(),
        }
    }
}

/// Experiment-specific knobs, all optional.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    /// Feature dimensions for `dim-sweep`.
    pub dims: Option<Vec<usize>>,
    /// Eigenvector ranks for rank-based experiments.
    pub ranks: Option<Vec<usize>>,
    /// Step between cumulative-target counts.
    pub count_step: Option<usize>,
    /// Cap on the largest cumulative-target count.
    pub max_count: Option<usize>,
    /// Which kernel's eigenvectors define targets: "train" or "full".
    pub targets_basis: Option<String>,
    /// Train fraction for `resample-volatility` when `train_size` is absent.
    pub train_fraction: Option<f64>,
    /// Number of test rows evaluated by `bound`.
    pub test_rows: Option<usize>,
    /// Relative alignment threshold for the bound's cross-gap sum.
    pub align_tol: Option<f64>,
    /// Additive approximation constant for the squared bound.
    pub approx_const: Option<f64>,
    /// Row alignment strategy for the kernel distance in `bound`.
    pub permutation_strategy: Option<PermutationStrategy>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub dataset: Option<DatasetConfig>,
    pub kernel: Option<KernelConfig>,
    pub kernel_b: Option<KernelConfig>,
    pub targets: Option<TargetsField>,
    pub ridge_grid: Option<Vec<f64>>,
    pub train_size: Option<usize>,
    pub repeats: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub sweep: SweepConfig,
}

/// A fully resolved configuration, ready to run.
#[derive(Debug, Clone, Serialize)]
pub struct ResolvedConfig {
    pub experiment: ExperimentKind,
    pub dataset: DatasetConfig,
    pub kernel: KernelConfig,
    pub kernel_b: Option<KernelConfig>,
    pub targets: Vec<TargetConfig>,
    pub ridge_grid: Vec<f64>,
    pub train_size: Option<usize>,
    pub repeats: usize,
    pub seed: u64,
    pub output_dir: PathBuf,
    pub sweep: SweepConfig,
    pub full_scale: bool,
}

/// Outcome of `validate`: resolved defaults and any problems found.
#[derive(Debug)]
pub struct ValidationReport {
    pub notes: Vec<String>,
    pub errors: Vec<String>,
    pub resolved: Option<ResolvedConfig>,
}

pub fn parse_config(path: &Path) -> Result<ExperimentConfig, HarnessError> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        HarnessError::Config(format!("cannot read config {}: {e}", path.display()))
    })?;
    toml::from_str(&text)
        .map_err(|e| HarnessError::Config(format!("config parse error in {}: {e}", path.display())))
}

/// Desk-scale and full-scale defaults for `dim-sweep`.
pub fn dim_sweep_defaults(full_scale: bool) -> (usize, Vec<usize>, Vec<usize>) {
    if full_scale {
        (
            1000,
            vec![10, 100, 200, 300, 500, 600, 800, 900],
            vec![1, 2, 100, 400, 500],
        )
    } else {
        (
            400,
            vec![10, 50, 100, 150, 200, 300, 400],
            vec![1, 2, 50, 100, 150],
        )
    }
}

/// Validates and resolves a parsed config. `full_scale` restores the paper's
/// grid sizes where desk-scale defaults shrink them.
pub fn resolve(config: &ExperimentConfig, full_scale: bool, output_override: Option<&Path>) -> ValidationReport {
    let mut notes = Vec::new();
    let mut errors = Vec::new();

    let kind = config.experiment;

    // Dataset defaults per experiment.
    let dataset = match &config.dataset {
        Some(d) => d.clone(),
        None => {
            let d = match kind {
                ExperimentKind::DimSweep => {
                    let (n, _, _) = dim_sweep_defaults(full_scale);
                    let mut d = DatasetConfig::synthetic_default("synth-gaussian", n);
                    d.p = None;
                    d
                }
                ExperimentKind::RbfRankReg => {
                    let mut d = DatasetConfig::synthetic_default("synth-uniform", 1000);
                    d.low = Some(-3.0);
                    d.high = Some(3.0);
                    d
                }
                _ => DatasetConfig::synthetic_default("synth-binary-images", 200),
            };
            notes.push(format!(
                "dataset = {} (default for {})",
                d.kind,
                kind.name()
            ));
            d
        }
    };
    dataset.validate(&mut errors, &mut notes);

    // Kernel defaults per experiment.
    let kernel = match &config.kernel {
        Some(k) => k.clone(),
        None => {
            let k = match kind {
                ExperimentKind::DimSweep => {
                    let mut k = KernelConfig::of_family(KernelFamily::ScaledLinear);
                    k.scale = ScaleSpec::Named("dim".into());
                    k
                }
                ExperimentKind::RbfRankReg => KernelConfig::of_family(KernelFamily::Rbf),
                _ => KernelConfig::of_family(KernelFamily::ScaledSquare),
            };
            notes.push(format!(
                "kernel.family = {} (default for {})",
                k.family.name(),
                kind.name()
            ));
            k
        }
    };
    kernel.validate("kernel", &mut errors);
    if let Some(kb) = &config.kernel_b {
        kb.validate("kernel_b", &mut errors);
    }
    if kind == ExperimentKind::MultiKernelCompare && config.kernel_b.is_none() {
        errors.push("kernel_b: required for multi-kernel-compare".into());
    }

    // Targets.
    let targets: Vec<TargetConfig> = match &config.targets {
        Some(t) => t.as_vec(),
        None if kind == ExperimentKind::TopVsTrailing => {
            notes.push(
                "targets = [u3 - u5, u100 + u101] (default for top-vs-trailing)".into(),
            );
            vec![
                TargetConfig {
                    kind: "indexed-combination".into(),
                    indices: Some(vec![3, 5]),
                    weights: Some(vec![1.0, -1.0]),
                    count: None,
                    seed: None,
                    scale: 1.0,
                    normalize: false,
                },
                TargetConfig {
                    kind: "indexed-combination".into(),
                    indices: Some(vec![100, 101]),
                    weights: Some(vec![1.0, 1.0]),
                    count: None,
                    seed: None,
                    scale: 1.0,
                    normalize: false,
                },
            ]
        }
        None => Vec::new(),
    };
    for (i, t) in targets.iter().enumerate() {
        t.validate(&format!("targets[{i}]"), &mut errors);
    }

    // Ridge grid.
    let ridge_grid = match &config.ridge_grid {
        Some(g) => {
            if g.is_empty() {
                errors.push("ridge_grid: must be non-empty".into());
            }
            for (i, &z) in g.iter().enumerate() {
                if !(z > 0.0) || !z.is_finite() {
                    errors.push(format!(
                        "ridge_grid: entries must be positive reals, entry {i} is {z}"
                    ));
                }
            }
            g.clone()
        }
        None => {
            let g = match kind {
                ExperimentKind::DimSweep => vec![1.0, 1e-2, 1e-4, 1e-6, 1e-8],
                ExperimentKind::RbfRankReg => vec![1e-2, 1e-8],
                ExperimentKind::KernelTable => vec![1e-3],
                _ => vec![1e-3],
            };
            notes.push(format!("ridge_grid = {g:?} (default)"));
            g
        }
    };

    // Train size against known dataset sizes.
    let known_size = dataset.static_size();
    if let (Some(ts), Some(n)) = (config.train_size, known_size) {
        if ts > n {
            errors.push(format!(
                "train_size (= {ts}) exceeds dataset size (= {n})"
            ));
        }
        if ts == 0 {
            errors.push("train_size: must be at least 1".into());
        }
    }

    let repeats = match config.repeats {
        Some(0) => {
            errors.push("repeats: must be at least 1".into());
            1
        }
        Some(r) => r,
        None => {
            let r = match kind {
                ExperimentKind::ResampleVolatility => 30,
                _ => 1,
            };
            notes.push(format!("repeats = {r} (default)"));
            r
        }
    };

    if let Some(basis) = &config.sweep.targets_basis {
        if basis != "train" && basis != "full" {
            errors.push(format!(
                "sweep.targets_basis: expected \"train\" or \"full\", got {basis:?}"
            ));
        }
    } else if kind == ExperimentKind::CumulativeTargets {
        notes.push("sweep.targets_basis = \"train\" (default)".into());
    }
    if let Some(f) = config.sweep.train_fraction {
        if !(0.0 < f && f < 1.0) {
            errors.push(format!(
                "sweep.train_fraction: must be in (0, 1), got {f}"
            ));
        }
    }
    if let Some(ranks) = &config.sweep.ranks {
        if ranks.is_empty() {
            errors.push("sweep.ranks: must be non-empty".into());
        }
        if ranks.iter().any(|&r| r == 0) {
            errors.push("sweep.ranks: ranks are 1-based, found 0".into());
        }
    }
    if let Some(dims) = &config.sweep.dims {
        if dims.is_empty() {
            errors.push("sweep.dims: must be non-empty".into());
        }
    }

    // Output directory precedence: CLI flag > config > environment > cwd.
    let output_dir = output_override
        .map(Path::to_path_buf)
        .or_else(|| config.output_dir.clone())
        .or_else(|| std::env::var_os(super::OUTPUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("kernspec-out"));
    if config.output_dir.is_none() && output_override.is_none() {
        notes.push(format!(
            "output_dir = {} (default; set {} or --output-dir to change)",
            output_dir.display(),
            super::OUTPUT_DIR_ENV
        ));
    }

    let resolved = if errors.is_empty() {
        Some(ResolvedConfig {
            experiment: kind,
            dataset,
            kernel,
            kernel_b: config.kernel_b.clone(),
            targets,
            ridge_grid,
            train_size: config.train_size,
            repeats,
            seed: config.seed,
            output_dir,
            sweep: config.sweep.clone(),
            full_scale,
        })
    } else {
        None
    };

    ValidationReport {
        notes,
        errors,
        resolved,
    }
}

/// Splitmix-style seed derivation for per-cell randomness; recorded in the
/// manifest so every cell is reproducible in isolation.
pub fn mix_seed(base: u64, a: u64, b: u64) -> u64 {
    let mut x = base
        ^ a.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ b.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

//! Config-driven experiment harness.
//!
//! `run` wires data, kernels, targets, fitting and diagnostics into one of
//! the named experiments and writes three files into the output directory:
//!
//! - `results.csv`: one row per sweep cell, byte-identical for a given
//!   config and seed;
//! - `summary.json`: per-cell aggregates plus rank correlations where the
//!   experiment defines them;
//! - `manifest.json`: the fully resolved config, seed derivation rule,
//!   preprocessing record and wall-clock timing.

pub mod bound;
pub mod config;
pub mod experiments;
pub mod output;
pub mod stats;

use serde_json::json;
use std::collections::BTreeMap;
use std::path::Path;
use thiserror::Error;

pub use bound::{bound_report, BoundReportFile, ReferenceStrategy};
pub use config::{parse_config, resolve, ExperimentConfig, ResolvedConfig, ValidationReport};
pub use output::{ResultRow, Summary};

/// Environment variable giving the default output directory.
pub const OUTPUT_DIR_ENV: &str = "KERNSPEC_OUTPUT_DIR";

#[derive(Debug, Error)]
pub enum HarnessError {
    /// Invalid configuration; maps to exit code 1.
    #[error("config error: {0}")]
    Config(String),
    /// Runtime or numerical failure; maps to exit code 2.
    #[error("runtime error: {0}")]
    Runtime(String),
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) => 1,
            HarnessError::Runtime(_) => 2,
        }
    }
}

macro_rules! runtime_from {
    ($($ty:ty),*) => {
        $(impl From<$ty> for HarnessError {
            fn from(e: $ty) -> Self {
                HarnessError::Runtime(e.to_string())
            }
        })*
    };
}

runtime_from!(
    crate::linalg::LinalgError,
    crate::kernels::KernelError,
    crate::krr::KrrError,
    crate::targets::TargetError,
    crate::data::DataError,
    crate::diagnostics::DiagnosticsError
);

/// Validates a config file, returning resolved defaults and problems without
/// running anything.
pub fn validate_file(path: &Path, full_scale: bool) -> Result<ValidationReport, HarnessError> {
    let config = parse_config(path)?;
    Ok(resolve(&config, full_scale, None))
}

/// Result file paths written by [`run`].
#[derive(Debug)]
pub struct RunArtifacts {
    pub results_csv: std::path::PathBuf,
    pub summary_json: std::path::PathBuf,
    pub manifest_json: std::path::PathBuf,
}

/// Runs a resolved experiment config and writes `results.csv`,
/// `summary.json` and `manifest.json` into the output directory.
pub fn run(cfg: &ResolvedConfig) -> Result<RunArtifacts, HarnessError> {
    let started = std::time::Instant::now();
    let out = experiments::run_experiment(cfg)?;
    let elapsed_ms = started.elapsed().as_millis() as u64;

    std::fs::create_dir_all(&cfg.output_dir).map_err(|e| {
        HarnessError::Runtime(format!(
            "cannot create output dir {}: {e}",
            cfg.output_dir.display()
        ))
    })?;
    let results_csv = cfg.output_dir.join("results.csv");
    let summary_json = cfg.output_dir.join("summary.json");
    let manifest_json = cfg.output_dir.join("manifest.json");

    output::write_results_csv(&results_csv, &out.rows)?;
    output::write_json(&summary_json, &out.summary)?;

    let mut manifest = BTreeMap::<String, serde_json::Value>::new();
    manifest.insert(
        "config".into(),
        serde_json::to_value(cfg).map_err(|e| HarnessError::Runtime(e.to_string()))?,
    );
    manifest.insert(
        "seed_derivation".into(),
        json!("per-cell seeds are mix_seed(seed, stream, index): splitmix64 over the base seed and the cell coordinates"),
    );
    manifest.insert(
        "preprocessing".into(),
        json!({
            "dataset_kind": cfg.dataset.kind,
            "pixel_scaling": if cfg.dataset.raw_pixels { "raw 0-255" } else { "divided by 255" },
            "filter_classes": cfg.dataset.filter_classes,
            "sample_size_cap": cfg.dataset.sample_size,
        }),
    );
    manifest.insert("wall_time_ms_total".into(), json!(elapsed_ms));
    manifest.insert(
        "wall_time_note".into(),
        json!("per-row wall_time_ms is left empty in results.csv so the file is byte-identical across reruns"),
    );
    manifest.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
    for (k, v) in out.manifest_extra {
        manifest.insert(format!("experiment.{k}"), v);
    }
    output::write_json(&manifest_json, &manifest)?;

    Ok(RunArtifacts {
        results_csv,
        summary_json,
        manifest_json,
    })
}

/// Runs the bound evaluation and writes `bound_report.json`.
pub fn run_bound(
    cfg: &ResolvedConfig,
    strategy: ReferenceStrategy,
) -> Result<std::path::PathBuf, HarnessError> {
    let report = bound_report(cfg, strategy)?;
    std::fs::create_dir_all(&cfg.output_dir).map_err(|e| {
        HarnessError::Runtime(format!(
            "cannot create output dir {}: {e}",
            cfg.output_dir.display()
        ))
    })?;
    let path = cfg.output_dir.join("bound_report.json");
    output::write_json(&path, &report)?;
    Ok(path)
}

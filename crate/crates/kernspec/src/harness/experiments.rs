//! The experiment protocols behind `kernspec run`.
//!
//! Every experiment follows the same shape: build kernels, derive targets
//! from eigenvectors (or labels), fit across the ridge grid and emit one
//! [`ResultRow`] per sweep cell. Synthetic targets built on a kernel covering
//! the whole dataset are restricted to the training subsample for fitting, so
//! held-out rows keep well-defined ground truth.

use super::config::{dim_sweep_defaults, mix_seed, ExperimentKind, ResolvedConfig};
use super::output::{spearman_by_ridge, summarize_cells, ResultRow, Summary};
use super::HarnessError;
use crate::data::{subsample, synth_gaussian, Dataset};
use crate::diagnostics::within_gaps;
use crate::kernels::{cross_gram, gram, KernelMatrix};
use crate::krr::{generalization_error, ErrorMetric, KrrModel};
use crate::linalg::{sym_eig, EigenDecomposition, DEFAULT_RANK_TOL};
use crate::targets::{build_target, restrict_target, TargetSpec};
use ndarray::Array2;
use rayon::prelude::*;
use serde_json::json;
use std::collections::BTreeMap;
use std::sync::Arc;

pub struct ExperimentOutput {
    pub rows: Vec<ResultRow>,
    pub summary: Summary,
    pub manifest_extra: BTreeMap<String, serde_json::Value>,
}

fn eig_arc(km: &KernelMatrix) -> Result<Arc<EigenDecomposition>, HarnessError> {
    Ok(Arc::new(sym_eig(&km.gram, DEFAULT_RANK_TOL)?))
}

/// Minimum within-spectrum eigengap over a set of 1-based ranks.
fn min_gap(gaps: &[f64], ranks: &[usize]) -> Option<f64> {
    ranks
        .iter()
        .filter(|&&r| r >= 1 && r <= gaps.len())
        .map(|&r| gaps[r - 1])
        .fold(None, |acc: Option<f64>, g| {
            Some(acc.map_or(g, |a| a.min(g)))
        })
}

/// Scatters train-coordinate values onto the full index range, zero
/// elsewhere.
fn scatter(values: &[f64], positions: &[usize], len: usize) -> Vec<f64> {
    let mut out = vec![0.0; len];
    for (&pos, &v) in positions.iter().zip(values) {
        out[pos] = v;
    }
    out
}

fn default_train_size(cfg: &ResolvedConfig, n: usize) -> usize {
    cfg.train_size.unwrap_or_else(|| {
        let fraction = cfg.sweep.train_fraction.unwrap_or(0.7);
        ((n as f64 * fraction).round() as usize).clamp(1, n)
    })
}

fn check_train_size(train: usize, n: usize) -> Result<(), HarnessError> {
    if train > n {
        return Err(HarnessError::Config(format!(
            "train_size (= {train}) exceeds dataset size (= {n})"
        )));
    }
    Ok(())
}

pub fn run_experiment(cfg: &ResolvedConfig) -> Result<ExperimentOutput, HarnessError> {
    match cfg.experiment {
        ExperimentKind::DimSweep => dim_sweep(cfg),
        ExperimentKind::RbfRankReg => rbf_rank_reg(cfg),
        ExperimentKind::TopVsTrailing => top_vs_trailing(cfg),
        ExperimentKind::MultiKernelCompare => multi_kernel_compare(cfg),
        ExperimentKind::CumulativeTargets => cumulative_targets(cfg),
        ExperimentKind::ResampleVolatility => resample_volatility(cfg),
        ExperimentKind::KernelTable => kernel_table(cfg),
    }
}

/// Reconstruction error of random-weighted eigenvector targets as the
/// feature dimension sweeps past the sample size.
fn dim_sweep(cfg: &ResolvedConfig) -> Result<ExperimentOutput, HarnessError> {
    let (default_n, default_dims, default_ranks) = dim_sweep_defaults(cfg.full_scale);
    if cfg.dataset.kind != "synth-gaussian" {
        return Err(HarnessError::Config(format!(
            "dataset.kind: dim-sweep requires synth-gaussian, got {:?}",
            cfg.dataset.kind
        )));
    }
    let n = cfg.dataset.n.unwrap_or(default_n);
    let dims = cfg.sweep.dims.clone().unwrap_or(default_dims);
    let ranks: Vec<usize> = cfg
        .sweep
        .ranks
        .clone()
        .unwrap_or(default_ranks)
        .into_iter()
        .filter(|&r| r <= n)
        .collect();
    if ranks.is_empty() {
        return Err(HarnessError::Config(
            "sweep.ranks: no rank fits the dataset size".into(),
        ));
    }

    let cells: Result<Vec<Vec<ResultRow>>, HarnessError> = dims
        .par_iter()
        .map(|&p| {
            let mut rows = Vec::new();
            for run in 0..cfg.repeats {
                let data_seed = mix_seed(cfg.seed, run as u64, p as u64);
                let ds = synth_gaussian(n, p, data_seed);
                let spec = cfg.kernel.resolve(p)?;
                let km = gram(ds.features.view(), &spec)?;
                let eig = eig_arc(&km)?;
                let gaps = within_gaps(&eig.values);
                let target_seed = mix_seed(cfg.seed, 0xFA00 + run as u64, p as u64);
                let spec_t = TargetSpec::random_weighted(ranks.clone(), target_seed);
                let y = build_target(&eig, &spec_t)?;
                let gap = min_gap(&gaps, &ranks);
                for &z in &cfg.ridge_grid {
                    let model = KrrModel::from_eig(eig.clone(), &y, z)?;
                    rows.push(ResultRow {
                        experiment: cfg.experiment.name().into(),
                        run_index: run,
                        dim_p: Some(p),
                        ridge_z: z,
                        eigen_rank: None,
                        eigen_count: None,
                        kernel: km.spec.family.name().into(),
                        reconstruction_error: model.reconstruction_error(),
                        generalization_mse: None,
                        generalization_mae: None,
                        min_eigengap_aligned: gap,
                        seed: data_seed,
                        wall_time_ms: None,
                    });
                }
            }
            Ok(rows)
        })
        .collect();
    let mut rows: Vec<ResultRow> = cells?.into_iter().flatten().collect();
    rows.sort_by_key(|r| r.sort_key());

    let cells = summarize_cells(&rows);
    let mut manifest_extra = BTreeMap::new();
    manifest_extra.insert("dims".into(), json!(dims));
    manifest_extra.insert("target_ranks".into(), json!(ranks));
    manifest_extra.insert("sample_size_n".into(), json!(n));
    Ok(ExperimentOutput {
        rows,
        summary: Summary {
            experiment: cfg.experiment.name().into(),
            cells,
            spearman: BTreeMap::new(),
            extras: BTreeMap::new(),
        },
        manifest_extra,
    })
}

/// Per-eigenvector targets on an RBF kernel: targets are eigenvectors of the
/// full-data kernel, restricted to a training subsample; trained models
/// predict the entire dataset.
fn rbf_rank_reg(cfg: &ResolvedConfig) -> Result<ExperimentOutput, HarnessError> {
    let ds = cfg.dataset.load(mix_seed(cfg.seed, 0, 0))?;
    let n = ds.len();
    let train_size = cfg.train_size.unwrap_or(100.min(n));
    check_train_size(train_size, n)?;
    let ranks: Vec<usize> = cfg
        .sweep
        .ranks
        .clone()
        .unwrap_or_else(|| vec![1, 5, 10, 20, 40, 60, 80, 95])
        .into_iter()
        .filter(|&r| r <= train_size)
        .collect();

    let spec = cfg.kernel.resolve(ds.dim())?.resolve(ds.features.view())?;
    let km_full = gram(ds.features.view(), &spec)?;
    let eig_full = eig_arc(&km_full)?;
    let gaps_full = within_gaps(&eig_full.values);

    let per_repeat: Result<Vec<Vec<ResultRow>>, HarnessError> = (0..cfg.repeats)
        .into_par_iter()
        .map(|run| {
            let split_seed = mix_seed(cfg.seed, 1, run as u64);
            let (train_ds, kept, _) = subsample(&ds, train_size, split_seed)?;
            let km_train = gram(train_ds.features.view(), &spec)?;
            let eig_train = eig_arc(&km_train)?;
            let cross = cross_gram(
                ds.features.view(),
                train_ds.features.view(),
                &km_train.spec,
                &km_train.source_fingerprint,
            )?;
            let overlaps = cross.dot(&eig_train.vectors);
            let mut rows = Vec::new();
            for &rank in &ranks {
                let y_full = build_target(&eig_full, &TargetSpec::single(rank))?;
                let y_train = restrict_target(&y_full, &kept)?;
                for &z in &cfg.ridge_grid {
                    let model = KrrModel::from_eig(eig_train.clone(), &y_train, z)?;
                    let preds = model.predict_from_overlaps(overlaps.view())?;
                    rows.push(ResultRow {
                        experiment: cfg.experiment.name().into(),
                        run_index: run,
                        dim_p: Some(ds.dim()),
                        ridge_z: z,
                        eigen_rank: Some(rank),
                        eigen_count: None,
                        kernel: km_train.spec.family.name().into(),
                        reconstruction_error: model.reconstruction_error(),
                        generalization_mse: Some(generalization_error(
                            &preds,
                            &y_full,
                            ErrorMetric::Mse,
                        )?),
                        generalization_mae: Some(generalization_error(
                            &preds,
                            &y_full,
                            ErrorMetric::Mae,
                        )?),
                        min_eigengap_aligned: min_gap(&gaps_full, &[rank]),
                        seed: split_seed,
                        wall_time_ms: None,
                    });
                }
            }
            Ok(rows)
        })
        .collect();
    let mut rows: Vec<ResultRow> = per_repeat?.into_iter().flatten().collect();
    rows.sort_by_key(|r| r.sort_key());

    let cells = summarize_cells(&rows);
    let spearman = spearman_by_ridge(&cells, |c| c.eigen_rank, false, "rank-vs-log-ge-mse");
    let mut manifest_extra = BTreeMap::new();
    if let crate::kernels::Bandwidth::Fixed(sigma) = spec.bandwidth {
        manifest_extra.insert("resolved_bandwidth".into(), json!(sigma));
    }
    manifest_extra.insert("ranks".into(), json!(ranks));
    manifest_extra.insert("train_size".into(), json!(train_size));
    Ok(ExperimentOutput {
        rows,
        summary: Summary {
            experiment: cfg.experiment.name().into(),
            cells,
            spearman,
            extras: BTreeMap::new(),
        },
        manifest_extra,
    })
}

/// Shared protocol for experiments that fit full-kernel eigenvector targets
/// on a training split and evaluate on the held-out rows.
struct SplitFit {
    eig_train: Arc<EigenDecomposition>,
    kept: Vec<usize>,
    held: Vec<usize>,
    overlaps_held: Array2<f64>,
    kernel_name: String,
}

fn split_fit(
    ds: &Dataset,
    spec: &crate::kernels::KernelSpec,
    train_size: usize,
    split_seed: u64,
) -> Result<SplitFit, HarnessError> {
    let (train_ds, kept, held) = subsample(ds, train_size, split_seed)?;
    let km_train = gram(train_ds.features.view(), spec)?;
    let eig_train = eig_arc(&km_train)?;
    let held_features = Array2::from_shape_fn((held.len(), ds.dim()), |(i, j)| {
        ds.features[[held[i], j]]
    });
    let cross = cross_gram(
        held_features.view(),
        train_ds.features.view(),
        &km_train.spec,
        &km_train.source_fingerprint,
    )?;
    let overlaps_held = cross.dot(&eig_train.vectors);
    Ok(SplitFit {
        eig_train,
        kept,
        held,
        overlaps_held,
        kernel_name: km_train.spec.family.name().into(),
    })
}

/// Targets aligned with top vs trailing eigenvectors of the full kernel.
fn top_vs_trailing(cfg: &ResolvedConfig) -> Result<ExperimentOutput, HarnessError> {
    let ds = cfg.dataset.load(mix_seed(cfg.seed, 0, 0))?;
    let n = ds.len();
    let train_size = default_train_size(cfg, n);
    check_train_size(train_size, n)?;
    let spec = cfg.kernel.resolve(ds.dim())?.resolve(ds.features.view())?;
    let km_full = gram(ds.features.view(), &spec)?;
    let eig_full = eig_arc(&km_full)?;
    let gaps_full = within_gaps(&eig_full.values);

    let target_specs: Vec<TargetSpec> = cfg
        .targets
        .iter()
        .map(|t| t.to_spec(cfg.seed))
        .collect::<Result<_, _>>()?;
    if target_specs.is_empty() {
        return Err(HarnessError::Config(
            "targets: at least one target is required".into(),
        ));
    }

    let mut rows = Vec::new();
    for run in 0..cfg.repeats {
        let split_seed = mix_seed(cfg.seed, 1, run as u64);
        let fit = split_fit(&ds, &spec, train_size, split_seed)?;
        for spec_t in &target_specs {
            let y_full = build_target(&eig_full, spec_t)?;
            let y_train = restrict_target(&y_full, &fit.kept)?;
            let y_held = restrict_target(&y_full, &fit.held)?;
            let ranks = spec_t.ranks();
            for &z in &cfg.ridge_grid {
                let model = KrrModel::from_eig(fit.eig_train.clone(), &y_train, z)?;
                let preds = model.predict_from_overlaps(fit.overlaps_held.view())?;
                rows.push(ResultRow {
                    experiment: cfg.experiment.name().into(),
                    run_index: run,
                    dim_p: Some(ds.dim()),
                    ridge_z: z,
                    eigen_rank: ranks.first().copied(),
                    eigen_count: None,
                    kernel: fit.kernel_name.clone(),
                    reconstruction_error: model.reconstruction_error(),
                    generalization_mse: Some(generalization_error(
                        &preds,
                        &y_held,
                        ErrorMetric::Mse,
                    )?),
                    generalization_mae: Some(generalization_error(
                        &preds,
                        &y_held,
                        ErrorMetric::Mae,
                    )?),
                    min_eigengap_aligned: min_gap(&gaps_full, &ranks),
                    seed: split_seed,
                    wall_time_ms: None,
                });
            }
        }
    }
    rows.sort_by_key(|r| r.sort_key());
    let cells = summarize_cells(&rows);
    let mut manifest_extra = BTreeMap::new();
    manifest_extra.insert("train_size".into(), json!(train_size));
    Ok(ExperimentOutput {
        rows,
        summary: Summary {
            experiment: cfg.experiment.name().into(),
            cells,
            spearman: BTreeMap::new(),
            extras: BTreeMap::new(),
        },
        manifest_extra,
    })
}

/// Two kernels compared on evenly spaced eigenvector targets scaled to norm
/// 10.
fn multi_kernel_compare(cfg: &ResolvedConfig) -> Result<ExperimentOutput, HarnessError> {
    let ds = cfg.dataset.load(mix_seed(cfg.seed, 0, 0))?;
    let n = ds.len();
    let train_size = default_train_size(cfg, n);
    check_train_size(train_size, n)?;
    // Paper-style spacing: ceil(k * n / 10) for k = 1..10.
    let ranks: Vec<usize> = cfg.sweep.ranks.clone().unwrap_or_else(|| {
        let mut v: Vec<usize> = (1..=10)
            .map(|k| ((k * n) as f64 / 10.0).ceil() as usize)
            .map(|r| r.clamp(1, n))
            .collect();
        v.dedup();
        v
    });

    let kernel_b = cfg
        .kernel_b
        .clone()
        .ok_or_else(|| HarnessError::Config("kernel_b: required for multi-kernel-compare".into()))?;
    let kernels = [("a", cfg.kernel.clone()), ("b", kernel_b)];

    let mut rows = Vec::new();
    for run in 0..cfg.repeats {
        let split_seed = mix_seed(cfg.seed, 1, run as u64);
        for (tag, kcfg) in &kernels {
            let spec = kcfg.resolve(ds.dim())?.resolve(ds.features.view())?;
            let km_full = gram(ds.features.view(), &spec)?;
            let eig_full = eig_arc(&km_full)?;
            let gaps_full = within_gaps(&eig_full.values);
            let fit = split_fit(&ds, &spec, train_size, split_seed)?;
            let kernel_name = format!("{tag}:{}", fit.kernel_name);
            for &rank in &ranks {
                let spec_t = TargetSpec::single(rank).normalized().with_scale(10.0);
                let y_full = build_target(&eig_full, &spec_t)?;
                let y_train = restrict_target(&y_full, &fit.kept)?;
                let y_held = restrict_target(&y_full, &fit.held)?;
                for &z in &cfg.ridge_grid {
                    let model = KrrModel::from_eig(fit.eig_train.clone(), &y_train, z)?;
                    let preds = model.predict_from_overlaps(fit.overlaps_held.view())?;
                    rows.push(ResultRow {
                        experiment: cfg.experiment.name().into(),
                        run_index: run,
                        dim_p: Some(ds.dim()),
                        ridge_z: z,
                        eigen_rank: Some(rank),
                        eigen_count: None,
                        kernel: kernel_name.clone(),
                        reconstruction_error: model.reconstruction_error(),
                        generalization_mse: Some(generalization_error(
                            &preds,
                            &y_held,
                            ErrorMetric::Mse,
                        )?),
                        generalization_mae: Some(generalization_error(
                            &preds,
                            &y_held,
                            ErrorMetric::Mae,
                        )?),
                        min_eigengap_aligned: min_gap(&gaps_full, &[rank]),
                        seed: split_seed,
                        wall_time_ms: None,
                    });
                }
            }
        }
    }
    rows.sort_by_key(|r| r.sort_key());
    let cells = summarize_cells(&rows);
    let spearman = spearman_by_ridge(&cells, |c| c.eigen_rank, false, "rank-vs-log-ge-mse");
    let mut manifest_extra = BTreeMap::new();
    manifest_extra.insert("ranks".into(), json!(ranks));
    manifest_extra.insert(
        "rank_spacing_rule".into(),
        json!("ceil(k * n / 10) for k in 1..=10"),
    );
    manifest_extra.insert("train_size".into(), json!(train_size));
    Ok(ExperimentOutput {
        rows,
        summary: Summary {
            experiment: cfg.experiment.name().into(),
            cells,
            spearman,
            extras: BTreeMap::new(),
        },
        manifest_extra,
    })
}

/// Cumulative-mean targets over growing eigenvector counts.
fn cumulative_targets(cfg: &ResolvedConfig) -> Result<ExperimentOutput, HarnessError> {
    let ds = cfg.dataset.load(mix_seed(cfg.seed, 0, 0))?;
    let n = ds.len();
    let train_size = default_train_size(cfg, n);
    check_train_size(train_size, n)?;
    let basis_train = cfg
        .sweep
        .targets_basis
        .as_deref()
        .map(|b| b == "train")
        .unwrap_or(true);
    let step = cfg.sweep.count_step.unwrap_or(10).max(1);
    let basis_n = if basis_train { train_size } else { n };
    let max_count = cfg.sweep.max_count.unwrap_or(200).min(basis_n);
    let counts: Vec<usize> = (1..=max_count).step_by(step).collect();

    let spec = cfg.kernel.resolve(ds.dim())?.resolve(ds.features.view())?;
    let eig_full = if basis_train {
        None
    } else {
        Some(eig_arc(&gram(ds.features.view(), &spec)?)?)
    };

    let mut rows = Vec::new();
    for run in 0..cfg.repeats {
        let split_seed = mix_seed(cfg.seed, 1, run as u64);
        let (train_ds, kept, _) = subsample(&ds, train_size, split_seed)?;
        let km_train = gram(train_ds.features.view(), &spec)?;
        let eig_train = eig_arc(&km_train)?;
        // Predictions cover the entire dataset, training rows included.
        let cross_all = cross_gram(
            ds.features.view(),
            train_ds.features.view(),
            &km_train.spec,
            &km_train.source_fingerprint,
        )?;
        let overlaps_all = cross_all.dot(&eig_train.vectors);
        let basis_eig: &EigenDecomposition = eig_full.as_deref().unwrap_or(&eig_train);
        let basis_gaps = within_gaps(&basis_eig.values);
        for &count in &counts {
            let spec_t = TargetSpec::cumulative_mean(count);
            let (y_train, truth) = if basis_train {
                let y_train = build_target(&eig_train, &spec_t)?;
                // Train-basis targets have no off-sample definition; the
                // ground truth is their zero extension.
                let truth = scatter(&y_train, &kept, n);
                (y_train, truth)
            } else {
                let y_full = build_target(basis_eig, &spec_t)?;
                let y_train = restrict_target(&y_full, &kept)?;
                (y_train, y_full)
            };
            let count_ranks: Vec<usize> = (1..=count).collect();
            for &z in &cfg.ridge_grid {
                let model = KrrModel::from_eig(eig_train.clone(), &y_train, z)?;
                let preds = model.predict_from_overlaps(overlaps_all.view())?;
                rows.push(ResultRow {
                    experiment: cfg.experiment.name().into(),
                    run_index: run,
                    dim_p: Some(ds.dim()),
                    ridge_z: z,
                    eigen_rank: None,
                    eigen_count: Some(count),
                    kernel: km_train.spec.family.name().into(),
                    reconstruction_error: model.reconstruction_error(),
                    generalization_mse: Some(generalization_error(
                        &preds,
                        &truth,
                        ErrorMetric::Mse,
                    )?),
                    generalization_mae: Some(generalization_error(
                        &preds,
                        &truth,
                        ErrorMetric::Mae,
                    )?),
                    min_eigengap_aligned: min_gap(&basis_gaps, &count_ranks),
                    seed: split_seed,
                    wall_time_ms: None,
                });
            }
        }
    }
    rows.sort_by_key(|r| r.sort_key());
    let cells = summarize_cells(&rows);
    let spearman = spearman_by_ridge(&cells, |c| c.eigen_count, true, "count-vs-ge-mae");
    let mut manifest_extra = BTreeMap::new();
    manifest_extra.insert(
        "targets_basis".into(),
        json!(if basis_train { "train" } else { "full" }),
    );
    manifest_extra.insert("counts".into(), json!(counts));
    manifest_extra.insert("train_size".into(), json!(train_size));
    Ok(ExperimentOutput {
        rows,
        summary: Summary {
            experiment: cfg.experiment.name().into(),
            cells,
            spearman,
            extras: BTreeMap::new(),
        },
        manifest_extra,
    })
}

/// Volatility of per-eigenvector generalization error across resampled
/// splits.
fn resample_volatility(cfg: &ResolvedConfig) -> Result<ExperimentOutput, HarnessError> {
    let ds = cfg.dataset.load(mix_seed(cfg.seed, 0, 0))?;
    let n = ds.len();
    let train_size = default_train_size(cfg, n);
    check_train_size(train_size, n)?;
    let spec = cfg.kernel.resolve(ds.dim())?.resolve(ds.features.view())?;
    let km_full = gram(ds.features.view(), &spec)?;
    let eig_full = eig_arc(&km_full)?;
    let gaps_full = within_gaps(&eig_full.values);
    let ranks: Vec<usize> = cfg
        .sweep
        .ranks
        .clone()
        .unwrap_or_else(|| (1..=n).collect())
        .into_iter()
        .filter(|&r| r <= n)
        .collect();

    let per_split: Result<Vec<Vec<ResultRow>>, HarnessError> = (0..cfg.repeats)
        .into_par_iter()
        .map(|run| {
            let split_seed = mix_seed(cfg.seed, 1, run as u64);
            let fit = split_fit(&ds, &spec, train_size, split_seed)?;
            let mut rows = Vec::new();
            for &rank in &ranks {
                let y_full = build_target(&eig_full, &TargetSpec::single(rank))?;
                let y_train = restrict_target(&y_full, &fit.kept)?;
                let y_held = restrict_target(&y_full, &fit.held)?;
                for &z in &cfg.ridge_grid {
                    let model = KrrModel::from_eig(fit.eig_train.clone(), &y_train, z)?;
                    let preds = model.predict_from_overlaps(fit.overlaps_held.view())?;
                    rows.push(ResultRow {
                        experiment: cfg.experiment.name().into(),
                        run_index: run,
                        dim_p: Some(ds.dim()),
                        ridge_z: z,
                        eigen_rank: Some(rank),
                        eigen_count: None,
                        kernel: fit.kernel_name.clone(),
                        reconstruction_error: model.reconstruction_error(),
                        generalization_mse: Some(generalization_error(
                            &preds,
                            &y_held,
                            ErrorMetric::Mse,
                        )?),
                        generalization_mae: Some(generalization_error(
                            &preds,
                            &y_held,
                            ErrorMetric::Mae,
                        )?),
                        min_eigengap_aligned: min_gap(&gaps_full, &[rank]),
                        seed: split_seed,
                        wall_time_ms: None,
                    });
                }
            }
            Ok(rows)
        })
        .collect();
    let mut rows: Vec<ResultRow> = per_split?.into_iter().flatten().collect();
    rows.sort_by_key(|r| r.sort_key());
    let cells = summarize_cells(&rows);
    let spearman = spearman_by_ridge(&cells, |c| c.eigen_rank, false, "rank-vs-log-ge-mse");
    let mut manifest_extra = BTreeMap::new();
    manifest_extra.insert("train_size".into(), json!(train_size));
    manifest_extra.insert("splits".into(), json!(cfg.repeats));
    Ok(ExperimentOutput {
        rows,
        summary: Summary {
            experiment: cfg.experiment.name().into(),
            cells,
            spearman,
            extras: BTreeMap::new(),
        },
        manifest_extra,
    })
}

/// The four-kernel reconstruction/generalization comparison table on real
/// labels.
fn kernel_table(cfg: &ResolvedConfig) -> Result<ExperimentOutput, HarnessError> {
    let ds = cfg.dataset.load(mix_seed(cfg.seed, 0, 0))?;
    let n = ds.len();
    if ds.labels.is_empty() {
        return Err(HarnessError::Config(
            "dataset: kernel-table requires labels (set dataset.filter_classes or use a labeled source)"
                .into(),
        ));
    }
    if !ds.labels.iter().all(|&l| l == -1.0 || l == 1.0) {
        return Err(HarnessError::Config(
            "dataset.filter_classes: kernel-table expects labels filtered to -1/+1".into(),
        ));
    }
    let train_size = cfg.train_size.unwrap_or(n / 2);
    check_train_size(train_size, n)?;
    let split_seed = mix_seed(cfg.seed, 1, 0);
    let (train_ds, kept, held) = subsample(&ds, train_size, split_seed)?;
    let y_train: Vec<f64> = kept.iter().map(|&i| ds.labels[i]).collect();
    let y_held: Vec<f64> = held.iter().map(|&i| ds.labels[i]).collect();
    let held_features = Array2::from_shape_fn((held.len(), ds.dim()), |(i, j)| {
        ds.features[[held[i], j]]
    });

    let p = ds.dim();
    let sqrt_p = (p as f64).sqrt();
    let table: Vec<(String, crate::kernels::KernelSpec)> = vec![
        (
            "K1-linear".into(),
            crate::kernels::KernelSpec::new(crate::kernels::KernelFamily::Linear),
        ),
        (
            "K2-scaled-linear".into(),
            crate::kernels::KernelSpec::new(crate::kernels::KernelFamily::ScaledLinear)
                .with_scale(sqrt_p),
        ),
        (
            "K3-scaled-square".into(),
            crate::kernels::KernelSpec::new(crate::kernels::KernelFamily::ScaledSquare)
                .with_scale(sqrt_p),
        ),
        (
            "K4-trivial-diagonal".into(),
            crate::kernels::KernelSpec::new(crate::kernels::KernelFamily::TrivialDiagonal)
                .with_diag_value(500.0),
        ),
    ];

    let mut rows = Vec::new();
    for (name, spec) in &table {
        let km = gram(train_ds.features.view(), spec)?;
        let eig = eig_arc(&km)?;
        let cross = cross_gram(
            held_features.view(),
            train_ds.features.view(),
            &km.spec,
            &km.source_fingerprint,
        )?;
        for &z in &cfg.ridge_grid {
            let model = KrrModel::from_eig(eig.clone(), &y_train, z)?;
            let preds = model.predict(cross.view())?;
            rows.push(ResultRow {
                experiment: cfg.experiment.name().into(),
                run_index: 0,
                dim_p: Some(p),
                ridge_z: z,
                eigen_rank: None,
                eigen_count: None,
                kernel: name.clone(),
                reconstruction_error: model.reconstruction_error(),
                generalization_mse: Some(generalization_error(
                    &preds,
                    &y_held,
                    ErrorMetric::Mse,
                )?),
                generalization_mae: Some(generalization_error(
                    &preds,
                    &y_held,
                    ErrorMetric::Mae,
                )?),
                min_eigengap_aligned: None,
                seed: split_seed,
                wall_time_ms: None,
            });
        }
    }
    rows.sort_by_key(|r| r.sort_key());
    let cells = summarize_cells(&rows);
    let mut extras = BTreeMap::new();
    let mean_sq_truth = y_held.iter().map(|v| v * v).sum::<f64>() / y_held.len() as f64;
    extras.insert("mean_squared_test_truth".into(), mean_sq_truth);
    let mut manifest_extra = BTreeMap::new();
    manifest_extra.insert("train_size".into(), json!(train_size));
    manifest_extra.insert("train_indices".into(), json!(kept));
    manifest_extra.insert("test_indices".into(), json!(held));
    Ok(ExperimentOutput {
        rows,
        summary: Summary {
            experiment: cfg.experiment.name().into(),
            cells,
            spearman: BTreeMap::new(),
            extras,
        },
        manifest_extra,
    })
}

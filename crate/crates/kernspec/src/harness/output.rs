//! Result rows and the three output files: `results.csv`, `summary.json`
//! and `manifest.json`.
//!
//! `results.csv` is byte-identical across runs of the same config and seed,
//! so the per-row `wall_time_ms` column stays empty; run timing lives in the
//! manifest instead.

use super::stats::{mean_std, spearman};
use super::HarnessError;
use serde::Serialize;
use std::collections::BTreeMap;
use std::path::Path;

/// One experimental cell: coordinates first, metrics last.
#[derive(Debug, Clone, Serialize)]
pub struct ResultRow {
    pub experiment: String,
    pub run_index: usize,
    pub dim_p: Option<usize>,
    pub ridge_z: f64,
    pub eigen_rank: Option<usize>,
    pub eigen_count: Option<usize>,
    pub kernel: String,
    pub reconstruction_error: f64,
    pub generalization_mse: Option<f64>,
    pub generalization_mae: Option<f64>,
    pub min_eigengap_aligned: Option<f64>,
    pub seed: u64,
    pub wall_time_ms: Option<u64>,
}

impl ResultRow {
    /// Sort key giving the deterministic on-disk row order, independent of
    /// the parallel schedule that produced the rows.
    pub fn sort_key(&self) -> (usize, usize, String, usize, usize, u64) {
        (
            self.run_index,
            self.dim_p.unwrap_or(0),
            self.kernel.clone(),
            self.eigen_rank.unwrap_or(0),
            self.eigen_count.unwrap_or(0),
            self.ridge_z.to_bits(),
        )
    }
}

pub fn write_results_csv(path: &Path, rows: &[ResultRow]) -> Result<(), HarnessError> {
    let mut writer = csv::Writer::from_path(path)
        .map_err(|e| HarnessError::Runtime(format!("cannot write {}: {e}", path.display())))?;
    for row in rows {
        writer
            .serialize(row)
            .map_err(|e| HarnessError::Runtime(format!("csv serialization failed: {e}")))?;
    }
    writer
        .flush()
        .map_err(|e| HarnessError::Runtime(format!("csv flush failed: {e}")))?;
    Ok(())
}

/// Aggregate of one sweep cell across repeats.
#[derive(Debug, Clone, Serialize)]
pub struct CellSummary {
    pub dim_p: Option<usize>,
    pub ridge_z: f64,
    pub eigen_rank: Option<usize>,
    pub eigen_count: Option<usize>,
    pub kernel: String,
    pub rows: usize,
    pub mean_reconstruction_error: f64,
    pub std_reconstruction_error: f64,
    pub mean_generalization_mse: Option<f64>,
    pub std_generalization_mse: Option<f64>,
    pub mean_generalization_mae: Option<f64>,
    pub std_generalization_mae: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub experiment: String,
    pub cells: Vec<CellSummary>,
    /// Spearman rank correlations keyed by a description of the pairing,
    /// e.g. "rank-vs-log-ge-mse@z=1e-8". Only present where applicable.
    pub spearman: BTreeMap<String, f64>,
    /// Free-form per-experiment scalars (e.g. mean squared truth for the
    /// trivial kernel comparison).
    pub extras: BTreeMap<String, f64>,
}

type CellKey = (Option<usize>, u64, Option<usize>, Option<usize>, String);

/// Groups rows into cells (same coordinates, all repeats) preserving first
/// occurrence order.
pub fn summarize_cells(rows: &[ResultRow]) -> Vec<CellSummary> {
    let mut order: Vec<CellKey> = Vec::new();
    let mut groups: BTreeMap<CellKey, Vec<&ResultRow>> = BTreeMap::new();
    for row in rows {
        let key = (
            row.dim_p,
            row.ridge_z.to_bits(),
            row.eigen_rank,
            row.eigen_count,
            row.kernel.clone(),
        );
        if !groups.contains_key(&key) {
            order.push(key.clone());
        }
        groups.entry(key).or_default().push(row);
    }
    order
        .into_iter()
        .map(|key| {
            let members = &groups[&key];
            let recon: Vec<f64> = members.iter().map(|r| r.reconstruction_error).collect();
            let (mean_recon, std_recon) = mean_std(&recon);
            let mse: Vec<f64> = members
                .iter()
                .filter_map(|r| r.generalization_mse)
                .collect();
            let mae: Vec<f64> = members
                .iter()
                .filter_map(|r| r.generalization_mae)
                .collect();
            let (mean_mse, std_mse) = if mse.is_empty() {
                (None, None)
            } else {
                let (m, s) = mean_std(&mse);
                (Some(m), Some(s))
            };
            let (mean_mae, std_mae) = if mae.is_empty() {
                (None, None)
            } else {
                let (m, s) = mean_std(&mae);
                (Some(m), Some(s))
            };
            let first = members[0];
            CellSummary {
                dim_p: first.dim_p,
                ridge_z: first.ridge_z,
                eigen_rank: first.eigen_rank,
                eigen_count: first.eigen_count,
                kernel: first.kernel.clone(),
                rows: members.len(),
                mean_reconstruction_error: mean_recon,
                std_reconstruction_error: std_recon,
                mean_generalization_mse: mean_mse,
                std_generalization_mse: std_mse,
                mean_generalization_mae: mean_mae,
                std_generalization_mae: std_mae,
            }
        })
        .collect()
}

/// Spearman of coordinate vs log mean generalization error, per ridge value
/// and kernel, over cells with the given coordinate extractor.
pub fn spearman_by_ridge<F>(
    cells: &[CellSummary],
    coord: F,
    use_mae: bool,
    label: &str,
) -> BTreeMap<String, f64>
where
    F: Fn(&CellSummary) -> Option<usize>,
{
    let mut keys: Vec<(String, u64)> = Vec::new();
    for c in cells {
        let k = (c.kernel.clone(), c.ridge_z.to_bits());
        if !keys.contains(&k) {
            keys.push(k);
        }
    }
    let mut out = BTreeMap::new();
    for (kernel, zbits) in keys {
        let z = f64::from_bits(zbits);
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for c in cells {
            if c.kernel != kernel || c.ridge_z.to_bits() != zbits {
                continue;
            }
            let Some(x) = coord(c) else { continue };
            let value = if use_mae {
                c.mean_generalization_mae
            } else {
                c.mean_generalization_mse
            };
            let Some(v) = value else { continue };
            xs.push(x as f64);
            ys.push(if use_mae { v } else { v.max(1e-300).ln() });
        }
        if xs.len() >= 2 {
            out.insert(format!("{label}@kernel={kernel},z={z:e}"), spearman(&xs, &ys));
        }
    }
    out
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), HarnessError> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| HarnessError::Runtime(format!("json serialization failed: {e}")))?;
    std::fs::write(path, text)
        .map_err(|e| HarnessError::Runtime(format!("cannot write {}: {e}", path.display())))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(run: usize, rank: usize, z: f64, mse: f64) -> ResultRow {
        ResultRow {
            experiment: "t".into(),
            run_index: run,
            dim_p: None,
            ridge_z: z,
            eigen_rank: Some(rank),
            eigen_count: None,
            kernel: "rbf".into(),
            reconstruction_error: 0.1,
            generalization_mse: Some(mse),
            generalization_mae: Some(mse / 2.0),
            min_eigengap_aligned: None,
            seed: 0,
            wall_time_ms: None,
        }
    }

    #[test]
    fn cells_aggregate_over_repeats() {
        let rows = vec![
            row(0, 1, 0.5, 2.0),
            row(1, 1, 0.5, 4.0),
            row(0, 2, 0.5, 8.0),
        ];
        let cells = summarize_cells(&rows);
        assert_eq!(cells.len(), 2);
        assert_eq!(cells[0].rows, 2);
        assert_eq!(cells[0].mean_generalization_mse, Some(3.0));
        assert_eq!(cells[1].rows, 1);
    }

    #[test]
    fn spearman_by_ridge_increasing_ranks() {
        let rows = vec![
            row(0, 1, 0.5, 1.0),
            row(0, 2, 0.5, 2.0),
            row(0, 3, 0.5, 4.0),
        ];
        let cells = summarize_cells(&rows);
        let rho = spearman_by_ridge(&cells, |c| c.eigen_rank, false, "rank-vs-log-ge-mse");
        assert_eq!(rho.len(), 1);
        assert!((rho.values().next().unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn csv_is_deterministic() {
        let dir = tempfile::TempDir::new().unwrap();
        let rows = vec![row(0, 1, 0.5, 1.0), row(0, 2, 1e-8, 2.0)];
        let a = dir.path().join("a.csv");
        let b = dir.path().join("b.csv");
        write_results_csv(&a, &rows).unwrap();
        write_results_csv(&b, &rows).unwrap();
        assert_eq!(std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
    }
}

//! Synthetic learning targets built from kernel eigenvectors.
//!
//! Eigenvector ranks are 1-based everywhere a `TargetSpec` is written down
//! (configs, reports); internal arrays stay 0-based.

use crate::linalg::EigenDecomposition;
use rand::{Rng, SeedableRng};
use rand_pcg::Pcg64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TargetError {
    #[error("eigenvector rank {rank} is out of range [1, {n}]")]
    RankOutOfRange { rank: usize, n: usize },
    #[error("indices and weights must have the same length: {indices} vs {weights}")]
    WeightLengthMismatch { indices: usize, weights: usize },
    #[error("indices must be non-empty")]
    EmptyIndices,
    #[error("count must be in [1, {n}], got {count}")]
    CountOutOfRange { count: usize, n: usize },
    #[error("weight at position {0} is not finite")]
    NonFiniteWeight(usize),
    #[error("combination has zero norm; cannot normalize")]
    ZeroNorm,
    #[error("sample index {index} is out of range [0, {n})")]
    SampleIndexOutOfRange { index: usize, n: usize },
    #[error("duplicate sample index {0}")]
    DuplicateSampleIndex(usize),
}

/// What to combine, with 1-based eigenvector ranks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum TargetKind {
    /// `sum_m weights[m] * u_{indices[m]}`
    IndexedCombination {
        indices: Vec<usize>,
        weights: Vec<f64>,
    },
    /// `(1/count) * sum_{i=1..count} u_i`
    CumulativeMean { count: usize },
    /// Normalized `sum_i w_i u_{indices[i]}` with `w_i` drawn from the seeded
    /// uniform(0, 1) stream.
    RandomWeighted { indices: Vec<usize>, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetSpec {
    #[serde(flatten)]
    pub kind: TargetKind,
    /// Applied after the optional normalization.
    pub scale: f64,
    /// Normalize the combination to unit norm before scaling.
    pub normalize: bool,
}

impl TargetSpec {
    pub fn indexed(indices: Vec<usize>, weights: Vec<f64>) -> Self {
        Self {
            kind: TargetKind::IndexedCombination { indices, weights },
            scale: 1.0,
            normalize: false,
        }
    }

    /// Single eigenvector target at a 1-based rank.
    pub fn single(rank: usize) -> Self {
        Self::indexed(vec![rank], vec![1.0])
    }

    pub fn cumulative_mean(count: usize) -> Self {
        Self {
            kind: TargetKind::CumulativeMean { count },
            scale: 1.0,
            normalize: false,
        }
    }

    pub fn random_weighted(indices: Vec<usize>, seed: u64) -> Self {
        Self {
            kind: TargetKind::RandomWeighted { indices, seed },
            scale: 1.0,
            normalize: false,
        }
    }

    pub fn with_scale(mut self, scale: f64) -> Self {
        self.scale = scale;
        self
    }

    pub fn normalized(mut self) -> Self {
        self.normalize = true;
        self
    }

    /// 1-based ranks this target draws on; used for eigengap reporting.
    pub fn ranks(&self) -> Vec<usize> {
        match &self.kind {
            TargetKind::IndexedCombination { indices, .. } => indices.clone(),
            TargetKind::CumulativeMean { count } => (1..=*count).collect(),
            TargetKind::RandomWeighted { indices, .. } => indices.clone(),
        }
    }
}

fn checked_combination(
    eig: &EigenDecomposition,
    indices: &[usize],
    weights: &[f64],
) -> Result<Vec<f64>, TargetError> {
    if indices.is_empty() {
        return Err(TargetError::EmptyIndices);
    }
    if indices.len() != weights.len() {
        return Err(TargetError::WeightLengthMismatch {
            indices: indices.len(),
            weights: weights.len(),
        });
    }
    let n = eig.dim();
    let mut out = vec![0.0; n];
    for (pos, (&rank, &w)) in indices.iter().zip(weights).enumerate() {
        if rank == 0 || rank > n {
            return Err(TargetError::RankOutOfRange { rank, n });
        }
        if !w.is_finite() {
            return Err(TargetError::NonFiniteWeight(pos));
        }
        let u = eig.vectors.column(rank - 1);
        for (o, &ui) in out.iter_mut().zip(u.iter()) {
            *o += w * ui;
        }
    }
    Ok(out)
}

/// Builds a target vector on the eigenbasis of a kernel.
pub fn build_target(eig: &EigenDecomposition, spec: &TargetSpec) -> Result<Vec<f64>, TargetError> {
    let n = eig.dim();
    let (mut y, normalize) = match &spec.kind {
        TargetKind::IndexedCombination { indices, weights } => {
            (checked_combination(eig, indices, weights)?, spec.normalize)
        }
        TargetKind::CumulativeMean { count } => {
            if *count == 0 || *count > n {
                return Err(TargetError::CountOutOfRange { count: *count, n });
            }
            let indices: Vec<usize> = (1..=*count).collect();
            let weights = vec![1.0 / *count as f64; *count];
            (checked_combination(eig, &indices, &weights)?, spec.normalize)
        }
        TargetKind::RandomWeighted { indices, seed } => {
            let mut rng = Pcg64::seed_from_u64(*seed);
            let weights: Vec<f64> = indices.iter().map(|_| rng.gen_range(0.0..1.0)).collect();
            // Random-weighted combinations are always normalized.
            (checked_combination(eig, indices, &weights)?, true)
        }
    };
    if normalize {
        let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(TargetError::ZeroNorm);
        }
        for v in &mut y {
            *v /= norm;
        }
    }
    if spec.scale != 1.0 {
        for v in &mut y {
            *v *= spec.scale;
        }
    }
    Ok(y)
}

/// Restricts a full-sample target to a subsample, in sample order. Indices
/// are 0-based positions into `y_full`.
pub fn restrict_target(y_full: &[f64], sample_indices: &[usize]) -> Result<Vec<f64>, TargetError> {
    let n = y_full.len();
    let mut seen = vec![false; n];
    let mut out = Vec::with_capacity(sample_indices.len());
    for &idx in sample_indices {
        if idx >= n {
            return Err(TargetError::SampleIndexOutOfRange { index: idx, n });
        }
        if seen[idx] {
            return Err(TargetError::DuplicateSampleIndex(idx));
        }
        seen[idx] = true;
        out.push(y_full[idx]);
    }
    Ok(out)
}

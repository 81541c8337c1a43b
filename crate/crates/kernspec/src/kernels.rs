//! Gram matrix construction for the kernel families used by the harness.
//!
//! All families except `rbf` are inner-product kernels `h(x_i^T x_j)`; the
//! trivial diagonal family is only defined on training indices and evaluates
//! to zero on unseen points.

use crate::linalg::{LinalgError, SymMatrix};
use ndarray::{Array2, ArrayView1, ArrayView2};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum KernelError {
    #[error("input matrix contains a non-finite value at row {row}, column {col}")]
    NonFiniteInput { row: usize, col: usize },
    #[error("input must have at least one row and one column, got {rows}x{cols}")]
    EmptyInput { rows: usize, cols: usize },
    #[error("feature dimension mismatch: test rows have {test} columns, training rows have {train}")]
    DimensionMismatch { test: usize, train: usize },
    #[error("kernel scale must be positive, got {0}")]
    NonPositiveScale(f64),
    #[error("rbf bandwidth must be positive, got {0}")]
    NonPositiveBandwidth(f64),
    #[error("diag_value must be positive, got {0}")]
    NonPositiveDiagValue(f64),
    #[error("rbf bandwidth is still the median-heuristic sentinel; resolve it against training data first")]
    UnresolvedBandwidth,
    #[error("median heuristic needs at least 2 rows, got {0}")]
    TooFewRows(usize),
    #[error("median pairwise distance is zero (all points identical); bandwidth is degenerate")]
    DegenerateBandwidth,
    #[error("training data does not match the fingerprint recorded at gram construction")]
    FingerprintMismatch,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Kernel family. Scale parameters are carried by [`KernelSpec`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KernelFamily {
    /// `h(t) = t`
    Linear,
    /// `h(t) = t / scale`
    ScaledLinear,
    /// `h(t) = t^2 / scale`
    ScaledSquare,
    /// `exp(-||x - y||^2 / (2 sigma^2))`
    Rbf,
    /// `diag_value` on the diagonal, zero elsewhere; cross-kernel entries are
    /// `diag_value` only for bitwise-identical rows.
    TrivialDiagonal,
}

impl KernelFamily {
    pub fn name(&self) -> &'static str {
        match self {
            KernelFamily::Linear => "linear",
            KernelFamily::ScaledLinear => "scaled-linear",
            KernelFamily::ScaledSquare => "scaled-square",
            KernelFamily::Rbf => "rbf",
            KernelFamily::TrivialDiagonal => "trivial-diagonal",
        }
    }
}

/// RBF bandwidth: either fixed or resolved from data by the median heuristic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Bandwidth {
    MedianHeuristic,
    Fixed(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub family: KernelFamily,
    /// Denominator `s` in `t/s` or `t^2/s`; ignored by other families.
    pub scale: f64,
    /// Only used by the `rbf` family.
    pub bandwidth: Bandwidth,
    /// Only used by the `trivial-diagonal` family.
    pub diag_value: f64,
}

impl KernelSpec {
    pub fn new(family: KernelFamily) -> Self {
        Self {
            family,
            scale: 1.0,
            bandwidth: Bandwidth::MedianHeuristic,
            diag_value: 1.0,
        }
    }

    pub fn with_scale(mut self, scale: f64) -> Self {
        self.scale = scale;
        self
    }

    pub fn with_bandwidth(mut self, bandwidth: Bandwidth) -> Self {
        self.bandwidth = bandwidth;
        self
    }

    pub fn with_diag_value(mut self, diag_value: f64) -> Self {
        self.diag_value = diag_value;
        self
    }

    fn validate(&self) -> Result<(), KernelError> {
        match self.family {
            KernelFamily::ScaledLinear | KernelFamily::ScaledSquare => {
                if !(self.scale > 0.0) {
                    return Err(KernelError::NonPositiveScale(self.scale));
                }
            }
            KernelFamily::Rbf => {
                if let Bandwidth::Fixed(s) = self.bandwidth {
                    if !(s > 0.0) {
                        return Err(KernelError::NonPositiveBandwidth(s));
                    }
                }
            }
            KernelFamily::TrivialDiagonal => {
                if !(self.diag_value > 0.0) {
                    return Err(KernelError::NonPositiveDiagValue(self.diag_value));
                }
            }
            KernelFamily::Linear => {}
        }
        Ok(())
    }

    /// Returns a copy with the bandwidth resolved against `x` when the
    /// median-heuristic sentinel is set. Families other than `rbf` are
    /// returned unchanged.
    pub fn resolve(&self, x: ArrayView2<'_, f64>) -> Result<KernelSpec, KernelError> {
        let mut spec = self.clone();
        if spec.family == KernelFamily::Rbf {
            if let Bandwidth::MedianHeuristic = spec.bandwidth {
                spec.bandwidth = Bandwidth::Fixed(median_heuristic_bandwidth(x)?);
            }
        }
        Ok(spec)
    }
}

/// A training Gram matrix together with the spec that produced it and a
/// fingerprint of the training inputs.
#[derive(Debug, Clone)]
pub struct KernelMatrix {
    pub spec: KernelSpec,
    pub gram: SymMatrix,
    pub source_fingerprint: [u8; 32],
}

impl KernelMatrix {
    pub fn dim(&self) -> usize {
        self.gram.dim()
    }
}

/// SHA-256 over the shape and raw bit patterns of a data matrix.
pub fn fingerprint(x: ArrayView2<'_, f64>) -> [u8; 32] {
    let mut hasher = Sha256::new();
    hasher.update((x.nrows() as u64).to_le_bytes());
    hasher.update((x.ncols() as u64).to_le_bytes());
    for &v in x.iter() {
        hasher.update(v.to_bits().to_le_bytes());
    }
    hasher.finalize().into()
}

fn check_finite(x: ArrayView2<'_, f64>) -> Result<(), KernelError> {
    let (rows, cols) = x.dim();
    if rows == 0 || cols == 0 {
        return Err(KernelError::EmptyInput { rows, cols });
    }
    for ((row, col), &v) in x.indexed_iter() {
        if !v.is_finite() {
            return Err(KernelError::NonFiniteInput { row, col });
        }
    }
    Ok(())
}

fn rows_bitwise_equal(a: ArrayView1<'_, f64>, b: ArrayView1<'_, f64>) -> bool {
    a.len() == b.len() && a.iter().zip(b.iter()).all(|(x, y)| x.to_bits() == y.to_bits())
}

fn kernel_entry(spec: &KernelSpec, xi: ArrayView1<'_, f64>, xj: ArrayView1<'_, f64>) -> f64 {
    match spec.family {
        KernelFamily::Linear => xi.dot(&xj),
        KernelFamily::ScaledLinear => xi.dot(&xj) / spec.scale,
        KernelFamily::ScaledSquare => {
            let t = xi.dot(&xj);
            t * t / spec.scale
        }
        KernelFamily::Rbf => {
            let sigma = match spec.bandwidth {
                Bandwidth::Fixed(s) => s,
                Bandwidth::MedianHeuristic => unreachable!("bandwidth resolved before evaluation"),
            };
            let sq: f64 = xi
                .iter()
                .zip(xj.iter())
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            (-sq / (2.0 * sigma * sigma)).exp()
        }
        KernelFamily::TrivialDiagonal => {
            if rows_bitwise_equal(xi, xj) {
                spec.diag_value
            } else {
                0.0
            }
        }
    }
}

/// Builds the training Gram matrix `K_n` for `n` data rows.
///
/// A median-heuristic bandwidth is resolved against `x` and the resolved spec
/// is stored on the returned [`KernelMatrix`].
pub fn gram(x: ArrayView2<'_, f64>, spec: &KernelSpec) -> Result<KernelMatrix, KernelError> {
    spec.validate()?;
    check_finite(x)?;
    let spec = spec.resolve(x)?;
    let n = x.nrows();
    let mut k = Array2::<f64>::zeros((n, n));
    if spec.family == KernelFamily::TrivialDiagonal {
        for i in 0..n {
            k[[i, i]] = spec.diag_value;
        }
    } else {
        for i in 0..n {
            for j in i..n {
                let v = kernel_entry(&spec, x.row(i), x.row(j));
                k[[i, j]] = v;
                k[[j, i]] = v;
            }
        }
    }
    Ok(KernelMatrix {
        spec,
        gram: SymMatrix::new(k)?,
        source_fingerprint: fingerprint(x),
    })
}

/// Builds the `m x n` cross-kernel matrix between test rows and training
/// rows. `train_fingerprint` must match the fingerprint recorded when the
/// training Gram matrix was built.
pub fn cross_gram(
    x_test: ArrayView2<'_, f64>,
    x_train: ArrayView2<'_, f64>,
    spec: &KernelSpec,
    train_fingerprint: &[u8; 32],
) -> Result<Array2<f64>, KernelError> {
    spec.validate()?;
    check_finite(x_test)?;
    check_finite(x_train)?;
    if x_test.ncols() != x_train.ncols() {
        return Err(KernelError::DimensionMismatch {
            test: x_test.ncols(),
            train: x_train.ncols(),
        });
    }
    if spec.family == KernelFamily::Rbf && spec.bandwidth == Bandwidth::MedianHeuristic {
        return Err(KernelError::UnresolvedBandwidth);
    }
    if &fingerprint(x_train) != train_fingerprint {
        return Err(KernelError::FingerprintMismatch);
    }
    let (m, n) = (x_test.nrows(), x_train.nrows());
    let mut k = Array2::<f64>::zeros((m, n));
    for i in 0..m {
        for j in 0..n {
            k[[i, j]] = kernel_entry(spec, x_test.row(i), x_train.row(j));
        }
    }
    Ok(k)
}

/// Median of all pairwise Euclidean distances (`i < j`). Even counts take the
/// mean of the two middle values. Errors when the median is zero.
pub fn median_heuristic_bandwidth(x: ArrayView2<'_, f64>) -> Result<f64, KernelError> {
    let n = x.nrows();
    if n < 2 {
        return Err(KernelError::TooFewRows(n));
    }
    check_finite(x)?;
    let mut dists = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            let sq: f64 = x
                .row(i)
                .iter()
                .zip(x.row(j).iter())
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            dists.push(sq.sqrt());
        }
    }
    dists.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let len = dists.len();
    let median = if len % 2 == 1 {
        dists[len / 2]
    } else {
        0.5 * (dists[len / 2 - 1] + dists[len / 2])
    };
    if median == 0.0 {
        return Err(KernelError::DegenerateBandwidth);
    }
    Ok(median)
}

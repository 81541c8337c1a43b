//! Kernel ridge regression in spectral form.
//!
//! Fitting routes through the eigendecomposition of the training kernel, not
//! through a direct `(K + zI)` solve: the eigenpairs are needed by the
//! diagnostics anyway and a single path keeps predictions and bound
//! computations consistent with each other. A plain matrix-solve formulation
//! exists only as an internal cross-check ([`KrrModel::predict_direct`]).

use crate::kernels::KernelMatrix;
use crate::linalg::{sym_eig, EigenDecomposition, LinalgError};
use ndarray::{Array1, ArrayView2};
use serde::Serialize;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum KrrError {
    #[error("target length {target} does not match kernel dimension {kernel}")]
    TargetLengthMismatch { target: usize, kernel: usize },
    #[error("target contains a non-finite value at index {0}")]
    NonFiniteTarget(usize),
    #[error("ridge must be non-negative, got {0}")]
    NegativeRidge(f64),
    #[error(
        "kernel is rank-deficient ({zero_count} zero eigenvalues under rank_tol {rank_tol:.1e}) and z = 0; the system is singular"
    )]
    SingularSystem { zero_count: usize, rank_tol: f64 },
    #[error("cross-kernel has {got} columns but the model was fitted on {expected} points")]
    CrossColumnMismatch { got: usize, expected: usize },
    #[error("prediction/truth length mismatch: {predictions} vs {truth}")]
    LengthMismatch { predictions: usize, truth: usize },
    #[error("error metric needs at least one point")]
    EmptyResiduals,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Fitted spectral KRR state.
///
/// Holds the eigendecomposition of `K_n`, the ridge `z`, the per-eigenvector
/// target projections `u_i^T y`, the spectral weights `d_i (u_i^T y) / (d_i + z)`
/// and the dual coefficients `alpha = (K_n + zI)^{-1} y` assembled from them.
#[derive(Debug, Clone)]
pub struct KrrModel {
    eig: Arc<EigenDecomposition>,
    ridge: f64,
    projections: Vec<f64>,
    spectral_weights: Vec<f64>,
    dual_coefficients: Array1<f64>,
    target: Vec<f64>,
}

/// Error metric for generalization measurements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ErrorMetric {
    Mse,
    Mae,
}

/// Per-fit error summary assembled by callers from the operations below.
#[derive(Debug, Clone, Serialize)]
pub struct ErrorReport {
    pub reconstruction_mse: f64,
    pub generalization_mse: f64,
    pub generalization_mae: f64,
    pub per_point_residuals: Vec<f64>,
}

impl KrrModel {
    /// Fits KRR on a training kernel via its eigendecomposition.
    ///
    /// `z = 0` is rejected when the kernel has eigenvalues classified as zero
    /// under the decomposition's rank tolerance: components in the null space
    /// cannot be reconstructed and a pseudo-inverse would silently hide that.
    pub fn fit(kernel: &KernelMatrix, y: &[f64], z: f64) -> Result<Self, KrrError> {
        let eig = sym_eig(&kernel.gram, crate::linalg::DEFAULT_RANK_TOL)?;
        Self::from_eig(Arc::new(eig), y, z)
    }

    /// Fits from a precomputed eigendecomposition; used by sweeps that reuse
    /// one decomposition across many targets and ridge values.
    pub fn from_eig(eig: Arc<EigenDecomposition>, y: &[f64], z: f64) -> Result<Self, KrrError> {
        let n = eig.dim();
        if y.len() != n {
            return Err(KrrError::TargetLengthMismatch {
                target: y.len(),
                kernel: n,
            });
        }
        if let Some(i) = y.iter().position(|v| !v.is_finite()) {
            return Err(KrrError::NonFiniteTarget(i));
        }
        if z < 0.0 {
            return Err(KrrError::NegativeRidge(z));
        }
        if z == 0.0 {
            let zero_count = eig.zero_indices().len();
            if zero_count > 0 {
                return Err(KrrError::SingularSystem {
                    zero_count,
                    rank_tol: eig.rank_tol,
                });
            }
        }

        let y_arr = Array1::from_vec(y.to_vec());
        let projections = eig.vectors.t().dot(&y_arr).to_vec();
        let mut spectral_weights = Vec::with_capacity(n);
        let mut dual_weights = Array1::<f64>::zeros(n);
        for i in 0..n {
            let d = eig.values[i];
            spectral_weights.push(d * projections[i] / (d + z));
            dual_weights[i] = projections[i] / (d + z);
        }
        let dual_coefficients = eig.vectors.dot(&dual_weights);

        Ok(Self {
            eig,
            ridge: z,
            projections,
            spectral_weights,
            dual_coefficients,
            target: y.to_vec(),
        })
    }

    pub fn dim(&self) -> usize {
        self.eig.dim()
    }

    pub fn ridge(&self) -> f64 {
        self.ridge
    }

    pub fn eig(&self) -> &EigenDecomposition {
        &self.eig
    }

    /// Target projections `u_i^T y`.
    pub fn projections(&self) -> &[f64] {
        &self.projections
    }

    /// Spectral weights `d_i (u_i^T y) / (d_i + z)`.
    pub fn spectral_weights(&self) -> &[f64] {
        &self.spectral_weights
    }

    /// Dual coefficients `alpha` with `(K_n + zI) alpha = y`.
    pub fn dual_coefficients(&self) -> &Array1<f64> {
        &self.dual_coefficients
    }

    pub fn target(&self) -> &[f64] {
        &self.target
    }

    /// Training reconstruction `y_hat = sum_i w_i u_i`.
    pub fn reconstruct(&self) -> Vec<f64> {
        let w = Array1::from_vec(self.spectral_weights.clone());
        self.eig.vectors.dot(&w).to_vec()
    }

    /// Predictions for test rows via the spectral expansion
    /// `sum_i (u_i^T y) (k~ . u_i) / (d_i + z)`.
    pub fn predict(&self, cross: ArrayView2<'_, f64>) -> Result<Vec<f64>, KrrError> {
        if cross.ncols() != self.dim() {
            return Err(KrrError::CrossColumnMismatch {
                got: cross.ncols(),
                expected: self.dim(),
            });
        }
        let overlaps = cross.dot(&self.eig.vectors); // m x n, entry (j, i) = k~_j . u_i
        let mut weights = Array1::<f64>::zeros(self.dim());
        for i in 0..self.dim() {
            weights[i] = self.projections[i] / (self.eig.values[i] + self.ridge);
        }
        Ok(overlaps.dot(&weights).to_vec())
    }

    /// Spectral prediction from precomputed overlaps `cross . U`: sweeps that
    /// reuse one test set across many targets and ridge values compute the
    /// overlap matrix once and call this per fit.
    pub fn predict_from_overlaps(&self, overlaps: ArrayView2<'_, f64>) -> Result<Vec<f64>, KrrError> {
        if overlaps.ncols() != self.dim() {
            return Err(KrrError::CrossColumnMismatch {
                got: overlaps.ncols(),
                expected: self.dim(),
            });
        }
        let mut weights = Array1::<f64>::zeros(self.dim());
        for i in 0..self.dim() {
            weights[i] = self.projections[i] / (self.eig.values[i] + self.ridge);
        }
        Ok(overlaps.dot(&weights).to_vec())
    }

    /// Predictions via the dual coefficients, `k~ . alpha`. Internal
    /// cross-check for [`KrrModel::predict`]; both agree to rounding.
    pub fn predict_direct(&self, cross: ArrayView2<'_, f64>) -> Result<Vec<f64>, KrrError> {
        if cross.ncols() != self.dim() {
            return Err(KrrError::CrossColumnMismatch {
                got: cross.ncols(),
                expected: self.dim(),
            });
        }
        Ok(cross.dot(&self.dual_coefficients).to_vec())
    }

    /// Reconstruction error `(1/n) sum_i ((u_i^T y) z / (d_i + z))^2`.
    ///
    /// Equals `(1/n) ||y - reconstruct()||^2` up to rounding.
    pub fn reconstruction_error(&self) -> f64 {
        let n = self.dim() as f64;
        let z = self.ridge;
        self.projections
            .iter()
            .zip(&self.eig.values)
            .map(|(&p, &d)| {
                if d == 0.0 {
                    // z = 0 with zero eigenvalues is rejected at fit time, so
                    // the ratio z / (d + z) is exactly 1 here.
                    p * p
                } else {
                    let r = p * z / (d + z);
                    r * r
                }
            })
            .sum::<f64>()
            / n
    }
}

/// Empirical generalization error: mean squared or mean absolute residual.
pub fn generalization_error(
    predictions: &[f64],
    truth: &[f64],
    metric: ErrorMetric,
) -> Result<f64, KrrError> {
    if predictions.len() != truth.len() {
        return Err(KrrError::LengthMismatch {
            predictions: predictions.len(),
            truth: truth.len(),
        });
    }
    if predictions.is_empty() {
        return Err(KrrError::EmptyResiduals);
    }
    let m = predictions.len() as f64;
    let sum: f64 = predictions
        .iter()
        .zip(truth)
        .map(|(&p, &t)| match metric {
            ErrorMetric::Mse => (t - p) * (t - p),
            ErrorMetric::Mae => (t - p).abs(),
        })
        .sum();
    Ok(sum / m)
}

/// Builds an [`ErrorReport`] from a fitted model and test data.
pub fn error_report(
    model: &KrrModel,
    predictions: &[f64],
    truth: &[f64],
) -> Result<ErrorReport, KrrError> {
    let generalization_mse = generalization_error(predictions, truth, ErrorMetric::Mse)?;
    let generalization_mae = generalization_error(predictions, truth, ErrorMetric::Mae)?;
    let per_point_residuals = truth
        .iter()
        .zip(predictions)
        .map(|(&t, &p)| t - p)
        .collect();
    Ok(ErrorReport {
        reconstruction_mse: model.reconstruction_error(),
        generalization_mse,
        generalization_mae,
        per_point_residuals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{gram, KernelFamily, KernelSpec};
    use crate::linalg::SymMatrix;
    use approx::assert_relative_eq;
    use ndarray::{array, Array2};
    use rand::{Rng, SeedableRng};
    use rand_pcg::Pcg64;

    /// Gaussian elimination with partial pivoting; the independent oracle for
    /// the spectral solve path.
    fn solve_dense(a: &Array2<f64>, b: &[f64]) -> Vec<f64> {
        let n = b.len();
        let mut m = a.clone();
        let mut rhs = b.to_vec();
        for col in 0..n {
            let mut piv = col;
            for r in (col + 1)..n {
                if m[[r, col]].abs() > m[[piv, col]].abs() {
                    piv = r;
                }
            }
            if piv != col {
                for c in 0..n {
                    let t = m[[col, c]];
                    m[[col, c]] = m[[piv, c]];
                    m[[piv, c]] = t;
                }
                rhs.swap(col, piv);
            }
            let d = m[[col, col]];
            for r in (col + 1)..n {
                let f = m[[r, col]] / d;
                if f == 0.0 {
                    continue;
                }
                for c in col..n {
                    m[[r, c]] -= f * m[[col, c]];
                }
                rhs[r] -= f * rhs[col];
            }
        }
        let mut x = vec![0.0; n];
        for r in (0..n).rev() {
            let mut s = rhs[r];
            for c in (r + 1)..n {
                s -= m[[r, c]] * x[c];
            }
            x[r] = s / m[[r, r]];
        }
        x
    }

    fn kernel_from_array(a: Array2<f64>) -> KernelMatrix {
        let fp = crate::kernels::fingerprint(a.view());
        KernelMatrix {
            spec: KernelSpec::new(KernelFamily::Linear),
            gram: SymMatrix::new(a).unwrap(),
            source_fingerprint: fp,
        }
    }

    fn random_psd_kernel(n: usize, seed: u64) -> KernelMatrix {
        let mut rng = Pcg64::seed_from_u64(seed);
        let x = Array2::from_shape_fn((n, n + 10), |_| rng.gen_range(-1.0..1.0));
        kernel_from_array(x.dot(&x.t()))
    }

    #[test]
    fn identity_kernel_interpolates_at_zero_ridge() {
        let k = kernel_from_array(Array2::eye(4));
        let y = vec![0.5, -1.0, 2.0, 0.0];
        let model = KrrModel::fit(&k, &y, 0.0).unwrap();
        let yhat = model.reconstruct();
        for (a, b) in yhat.iter().zip(&y) {
            assert_relative_eq!(a, b, epsilon = 1e-12);
        }
        for (a, b) in model.dual_coefficients().iter().zip(&y) {
            assert_relative_eq!(a, b, epsilon = 1e-12);
        }
        assert_eq!(model.reconstruction_error(), 0.0);
    }

    #[test]
    fn scalar_closed_form() {
        // K = diag(2), y = (1), z = 2: y_hat = 2 * 1 / (2 + 2) = 0.5.
        let k = kernel_from_array(array![[2.0]]);
        let model = KrrModel::fit(&k, &[1.0], 2.0).unwrap();
        assert_relative_eq!(model.reconstruct()[0], 0.5, epsilon = 1e-14);
    }

    #[test]
    fn spectral_matches_direct_solve() {
        for seed in 0..10u64 {
            let n = 50;
            let k = random_psd_kernel(n, seed);
            let mut rng = Pcg64::seed_from_u64(seed ^ 0xff);
            let y: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let z = 1e-3;
            let model = KrrModel::fit(&k, &y, z).unwrap();

            let mut shifted = k.gram.as_array().clone();
            for i in 0..n {
                shifted[[i, i]] += z;
            }
            let alpha = solve_dense(&shifted, &y);
            let oracle = k.gram.as_array().dot(&Array1::from_vec(alpha));

            let yhat = model.reconstruct();
            let scale = oracle.iter().fold(0.0_f64, |a, v| a.max(v.abs())).max(1.0);
            for (got, want) in yhat.iter().zip(oracle.iter()) {
                assert!(
                    (got - want).abs() <= 1e-8 * scale,
                    "seed {seed}: {got} vs {want}"
                );
            }
        }
    }

    #[test]
    fn single_mode_target() {
        let k = random_psd_kernel(12, 4);
        let eig = sym_eig(&k.gram, crate::linalg::DEFAULT_RANK_TOL).unwrap();
        let u1: Vec<f64> = eig.vectors.column(0).to_vec();
        let d1 = eig.values[0];
        let z = 0.7;
        let model = KrrModel::fit(&k, &u1, z).unwrap();
        let yhat = model.reconstruct();
        let factor = d1 / (d1 + z);
        for (got, want) in yhat.iter().zip(&u1) {
            assert_relative_eq!(*got, factor * want, epsilon = 1e-10);
        }
    }

    #[test]
    fn null_space_target_reconstructs_to_zero() {
        // diag(1, 0): the second basis vector spans the null space.
        let k = kernel_from_array(array![[1.0, 0.0], [0.0, 0.0]]);
        let model = KrrModel::fit(&k, &[0.0, 3.0], 0.5).unwrap();
        let yhat = model.reconstruct();
        assert_eq!(yhat[0], 0.0);
        assert_eq!(yhat[1], 0.0);
        // Null-space floor: E_re >= (1/n) * 3^2 for every z.
        assert!(model.reconstruction_error() >= 9.0 / 2.0 - 1e-12);
    }

    #[test]
    fn zero_ridge_with_rank_deficient_kernel_errors() {
        let k = kernel_from_array(array![[1.0, 0.0], [0.0, 0.0]]);
        assert!(matches!(
            KrrModel::fit(&k, &[1.0, 1.0], 0.0),
            Err(KrrError::SingularSystem { .. })
        ));
    }

    #[test]
    fn rejects_non_finite_target() {
        let k = kernel_from_array(Array2::eye(2));
        assert!(matches!(
            KrrModel::fit(&k, &[1.0, f64::NAN], 0.1),
            Err(KrrError::NonFiniteTarget(1))
        ));
    }

    #[test]
    fn predict_on_train_equals_reconstruct() {
        let x = {
            let mut rng = Pcg64::seed_from_u64(3);
            Array2::from_shape_fn((8, 5), |_| rng.gen_range(-1.0..1.0))
        };
        let km = gram(x.view(), &KernelSpec::new(KernelFamily::Linear)).unwrap();
        let y: Vec<f64> = (0..8).map(|i| (i as f64) / 4.0 - 1.0).collect();
        let model = KrrModel::fit(&km, &y, 1e-2).unwrap();
        let preds = model.predict(km.gram.as_array().view()).unwrap();
        let recon = model.reconstruct();
        for (a, b) in preds.iter().zip(&recon) {
            assert_relative_eq!(a, b, epsilon = 1e-10);
        }
    }

    #[test]
    fn hand_expanded_prediction() {
        // K = diag(1, 3), y = (1, 1), z = 0, cross row (1, 0):
        // alpha = (1, 1/3), prediction = 1.
        let k = kernel_from_array(array![[1.0, 0.0], [0.0, 3.0]]);
        let model = KrrModel::fit(&k, &[1.0, 1.0], 0.0).unwrap();
        let cross = array![[1.0, 0.0]];
        let pred = model.predict(cross.view()).unwrap();
        assert_relative_eq!(pred[0], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn predict_rejects_column_mismatch() {
        let k = kernel_from_array(Array2::eye(3));
        let model = KrrModel::fit(&k, &[1.0, 2.0, 3.0], 0.0).unwrap();
        let cross = Array2::<f64>::zeros((2, 4));
        assert!(matches!(
            model.predict(cross.view()),
            Err(KrrError::CrossColumnMismatch { .. })
        ));
    }

    #[test]
    fn reconstruction_error_scalar_formula() {
        // K = diag(1), y = (1), z = 1: ((1 * 1) / 2)^2 / 1 = 0.25.
        let k = kernel_from_array(array![[1.0]]);
        let model = KrrModel::fit(&k, &[1.0], 1.0).unwrap();
        assert_relative_eq!(model.reconstruction_error(), 0.25, epsilon = 1e-14);
    }

    #[test]
    fn reconstruction_error_matches_residual_norm() {
        for seed in 0..5u64 {
            let n = 30;
            let k = random_psd_kernel(n, 100 + seed);
            let mut rng = Pcg64::seed_from_u64(seed);
            let y: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            for z in [1e-6, 1e-2, 1.0] {
                let model = KrrModel::fit(&k, &y, z).unwrap();
                let via_formula = model.reconstruction_error();
                let yhat = model.reconstruct();
                let direct: f64 = y
                    .iter()
                    .zip(&yhat)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    / n as f64;
                assert!(
                    (via_formula - direct).abs() <= 1e-8 * direct.max(1e-30),
                    "seed {seed} z {z}: {via_formula} vs {direct}"
                );
            }
        }
    }

    #[test]
    fn larger_eigenvalues_reduce_reconstruction_error() {
        // Cor: scaling K by c > 1 strictly decreases E_re for fixed z > 0.
        let k = random_psd_kernel(20, 42);
        let mut rng = Pcg64::seed_from_u64(9);
        let y: Vec<f64> = (0..20).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let z = 0.5;
        let base = KrrModel::fit(&k, &y, z).unwrap().reconstruction_error();
        let scaled_kernel = kernel_from_array(k.gram.as_array() * 3.0);
        let scaled = KrrModel::fit(&scaled_kernel, &y, z)
            .unwrap()
            .reconstruction_error();
        assert!(scaled < base, "scaled {scaled} vs base {base}");
    }

    #[test]
    fn ridge_path_monotone_to_zero() {
        // Full-rank kernel: E_re decreases monotonically along z -> 0 and
        // ends below 1e-12 * ||y||^2 / n.
        let k = random_psd_kernel(25, 77);
        let mut rng = Pcg64::seed_from_u64(78);
        let y: Vec<f64> = (0..25).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let norm2: f64 = y.iter().map(|v| v * v).sum();
        let mut last = f64::INFINITY;
        let mut final_err = f64::NAN;
        for k_exp in 0..6 {
            let z = 10f64.powi(-2 * k_exp);
            let err = KrrModel::fit(&k, &y, z).unwrap().reconstruction_error();
            assert!(err <= last + 1e-15, "not monotone at z={z}");
            last = err;
            final_err = err;
        }
        assert!(final_err < 1e-12 * norm2 / 25.0);
    }

    #[test]
    fn generalization_error_cases() {
        let p = vec![1.0, -1.0];
        assert_eq!(
            generalization_error(&p, &p, ErrorMetric::Mse).unwrap(),
            0.0
        );
        let zeros = vec![0.0, 0.0];
        let pm = vec![1.0, -1.0];
        assert_eq!(
            generalization_error(&zeros, &pm, ErrorMetric::Mse).unwrap(),
            1.0
        );
        let truth = vec![1.0, -1.0];
        let preds = vec![0.5, 0.0];
        assert_relative_eq!(
            generalization_error(&preds, &truth, ErrorMetric::Mse).unwrap(),
            0.625
        );
        assert_relative_eq!(
            generalization_error(&preds, &truth, ErrorMetric::Mae).unwrap(),
            0.75
        );
        assert!(generalization_error(&preds, &truth[..1], ErrorMetric::Mse).is_err());
    }

    #[test]
    fn projections_capture_target_norm() {
        let k = random_psd_kernel(15, 5);
        let mut rng = Pcg64::seed_from_u64(6);
        let y: Vec<f64> = (0..15).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let model = KrrModel::fit(&k, &y, 0.1).unwrap();
        let proj_norm2: f64 = model.projections().iter().map(|p| p * p).sum();
        let norm2: f64 = y.iter().map(|v| v * v).sum();
        assert_relative_eq!(proj_norm2, norm2, max_relative = 1e-8);
    }

    #[test]
    fn dual_coefficients_satisfy_shifted_system() {
        let k = random_psd_kernel(20, 50);
        let mut rng = Pcg64::seed_from_u64(51);
        let y: Vec<f64> = (0..20).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let z = 1e-4;
        let model = KrrModel::fit(&k, &y, z).unwrap();
        let mut shifted = k.gram.as_array().clone();
        for i in 0..20 {
            shifted[[i, i]] += z;
        }
        let lhs = shifted.dot(model.dual_coefficients());
        let norm: f64 = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        let residual: f64 = lhs
            .iter()
            .zip(&y)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        assert!(residual <= 1e-6 * norm, "residual {residual}");
    }
}

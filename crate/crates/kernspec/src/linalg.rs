//! Dense symmetric linear algebra.
//!
//! Everything downstream (kernel fits, alignment profiles, perturbation
//! bounds) runs through the eigendecomposition produced here, so the solver
//! is deliberately deterministic: eigenvalues are sorted non-increasing with
//! stable tie order, eigenvector signs follow a fixed convention, and two
//! calls on the same matrix return bit-identical output.

use ndarray::Array2;
use thiserror::Error;

/// Relative symmetry tolerance accepted by [`SymMatrix::new`].
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Default relative threshold below which an eigenvalue is treated as zero.
pub const DEFAULT_RANK_TOL: f64 = 1e-12;

/// Maximum number of cyclic Jacobi sweeps before giving up.
const MAX_SWEEPS: usize = 100;

/// Convergence: off-diagonal Frobenius norm relative to the full norm.
const CONVERGENCE_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix of dimension 0 is not allowed")]
    EmptyMatrix,
    #[error("matrix is not symmetric: |A[{i},{j}] - A[{j},{i}]| = {deviation:.3e} exceeds tolerance {tol:.3e}")]
    NotSymmetric {
        i: usize,
        j: usize,
        deviation: f64,
        tol: f64,
    },
    #[error("matrix contains a non-finite entry at ({i},{j})")]
    NonFinite { i: usize, j: usize },
    #[error("Jacobi iteration did not converge after {sweeps} sweeps; off-diagonal residual {residual:.3e}")]
    NoConvergence { sweeps: usize, residual: f64 },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("rank tolerance must be non-negative, got {0}")]
    NegativeRankTol(f64),
}

/// A real symmetric matrix, stored symmetrized as `(A + A^T) / 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    data: Array2<f64>,
}

impl SymMatrix {
    /// Builds a symmetric matrix, verifying squareness, finiteness and
    /// symmetry up to [`SYMMETRY_TOL`] relative to the largest entry.
    pub fn new(a: Array2<f64>) -> Result<Self, LinalgError> {
        let (rows, cols) = a.dim();
        if rows != cols {
            return Err(LinalgError::NotSquare { rows, cols });
        }
        if rows == 0 {
            return Err(LinalgError::EmptyMatrix);
        }
        let mut max_abs: f64 = 0.0;
        for ((i, j), &v) in a.indexed_iter() {
            if !v.is_finite() {
                return Err(LinalgError::NonFinite { i, j });
            }
            max_abs = max_abs.max(v.abs());
        }
        let tol = SYMMETRY_TOL * max_abs.max(1.0);
        for i in 0..rows {
            for j in (i + 1)..rows {
                let deviation = (a[[i, j]] - a[[j, i]]).abs();
                if deviation > tol {
                    return Err(LinalgError::NotSymmetric {
                        i,
                        j,
                        deviation,
                        tol,
                    });
                }
            }
        }
        let mut data = a;
        for i in 0..rows {
            for j in (i + 1)..rows {
                let s = 0.5 * (data[[i, j]] + data[[j, i]]);
                data[[i, j]] = s;
                data[[j, i]] = s;
            }
        }
        Ok(Self { data })
    }

    /// Dimension `n` of the `n x n` matrix.
    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn as_array(&self) -> &Array2<f64> {
        &self.data
    }

    pub fn into_array(self) -> Array2<f64> {
        self.data
    }

    /// Entrywise difference of two same-size symmetric matrices.
    pub fn sub(&self, other: &SymMatrix) -> Result<SymMatrix, LinalgError> {
        if self.dim() != other.dim() {
            return Err(LinalgError::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(SymMatrix {
            data: &self.data - &other.data,
        })
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// Eigendecomposition of a symmetric matrix.
///
/// Eigenvalues are sorted non-increasing (ties keep ascending original
/// index), eigenvector columns are orthonormal, and each column is sign-fixed
/// so its largest-magnitude entry is positive. Eigenvalues whose magnitude
/// falls below `rank_tol` relative to the spectral radius are snapped to
/// exactly `0.0`, which makes the zero/nonzero split downstream exact.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition {
    /// Eigenvalues `d_1 >= d_2 >= ... >= d_n`.
    pub values: Vec<f64>,
    /// Column `i` is the unit eigenvector paired with `values[i]`.
    pub vectors: Array2<f64>,
    /// Relative threshold used for the zero classification.
    pub rank_tol: f64,
}

impl EigenDecomposition {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// Whether eigenvalue `i` was classified as zero (snapped to `0.0`).
    pub fn is_zero(&self, i: usize) -> bool {
        self.values[i] == 0.0
    }

    /// Indices of eigenvalues classified as zero.
    pub fn zero_indices(&self) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.is_zero(i)).collect()
    }

    /// True when no eigenvalue is classified as zero.
    pub fn is_full_rank(&self) -> bool {
        self.values.iter().all(|&d| d != 0.0)
    }

    /// Column `i` as a vector view.
    pub fn vector(&self, i: usize) -> ndarray::ArrayView1<'_, f64> {
        self.vectors.column(i)
    }

    /// Rebuilds `sum_i d_i u_i u_i^T`; used by reconstruction checks.
    pub fn reconstruct(&self) -> Array2<f64> {
        let n = self.dim();
        let mut out = Array2::<f64>::zeros((n, n));
        for (i, &d) in self.values.iter().enumerate() {
            if d == 0.0 {
                continue;
            }
            let u = self.vectors.column(i);
            for r in 0..n {
                let dur = d * u[r];
                for c in 0..n {
                    out[[r, c]] += dur * u[c];
                }
            }
        }
        out
    }
}

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
///
/// Rotations sweep the strict upper triangle in row-major order until the
/// off-diagonal Frobenius norm drops below `1e-12 * ||A||_F`, capped at 100
/// sweeps. Off-diagonal entries already below the per-entry share of the
/// convergence budget are zeroed instead of rotated, which keeps late sweeps
/// cheap without affecting the convergence contract.
pub fn sym_eig(a: &SymMatrix, rank_tol: f64) -> Result<EigenDecomposition, LinalgError> {
    if rank_tol < 0.0 {
        return Err(LinalgError::NegativeRankTol(rank_tol));
    }
    let n = a.dim();
    let fro = a.frobenius_norm();
    let target = CONVERGENCE_TOL * fro;
    // Budget per entry such that n(n-1)/2 skipped entries stay within target.
    let skip_tol = if n > 1 { target / n as f64 } else { 0.0 };

    // Flat row-major working copies keep the rotation loops tight.
    let mut m: Vec<f64> = a.as_array().iter().copied().collect();
    let mut v: Vec<f64> = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }

    let off_diag_norm = |m: &[f64]| -> f64 {
        let mut s = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                let x = m[p * n + q];
                s += 2.0 * x * x;
            }
        }
        s.sqrt()
    };

    let mut converged = n <= 1 || off_diag_norm(&m) <= target;
    let mut residual = 0.0;
    if !converged {
        for _sweep in 0..MAX_SWEEPS {
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = m[p * n + q];
                    if apq == 0.0 {
                        continue;
                    }
                    if apq.abs() <= skip_tol {
                        m[p * n + q] = 0.0;
                        m[q * n + p] = 0.0;
                        continue;
                    }
                    let app = m[p * n + p];
                    let aqq = m[q * n + q];
                    let diff = aqq - app;
                    // Stable tangent of the rotation angle.
                    let theta = 0.5 * diff / apq;
                    let mut t = 1.0 / (theta.abs() + (1.0 + theta * theta).sqrt());
                    if theta < 0.0 {
                        t = -t;
                    }
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = t * c;
                    let tau = s / (1.0 + c);
                    let h = t * apq;

                    m[p * n + p] = app - h;
                    m[q * n + q] = aqq + h;
                    m[p * n + q] = 0.0;
                    m[q * n + p] = 0.0;
                    for j in 0..n {
                        if j == p || j == q {
                            continue;
                        }
                        let g = m[p * n + j];
                        let hj = m[q * n + j];
                        let gp = g - s * (hj + g * tau);
                        let gq = hj + s * (g - hj * tau);
                        m[p * n + j] = gp;
                        m[j * n + p] = gp;
                        m[q * n + j] = gq;
                        m[j * n + q] = gq;
                    }
                    for j in 0..n {
                        let g = v[j * n + p];
                        let hj = v[j * n + q];
                        v[j * n + p] = g - s * (hj + g * tau);
                        v[j * n + q] = hj + s * (g - hj * tau);
                    }
                }
            }
            residual = off_diag_norm(&m);
            if residual <= target {
                converged = true;
                break;
            }
        }
    }
    if !converged {
        return Err(LinalgError::NoConvergence {
            sweeps: MAX_SWEEPS,
            residual,
        });
    }

    let raw: Vec<f64> = (0..n).map(|i| m[i * n + i]).collect();

    // Sort non-increasing; the stable sort keeps tied values in ascending
    // original index order.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| raw[j].partial_cmp(&raw[i]).unwrap());

    let spectral_radius = raw.iter().fold(0.0_f64, |acc, d| acc.max(d.abs()));
    let zero_cut = rank_tol * spectral_radius.max(1.0);

    let mut values = Vec::with_capacity(n);
    let mut vectors = Array2::<f64>::zeros((n, n));
    for (col, &src) in order.iter().enumerate() {
        let d = raw[src];
        values.push(if d.abs() <= zero_cut { 0.0 } else { d });

        // Sign convention: largest-magnitude entry positive, ties broken by
        // lowest index.
        let mut best = 0usize;
        let mut best_abs = -1.0;
        for r in 0..n {
            let x = v[r * n + src].abs();
            if x > best_abs {
                best_abs = x;
                best = r;
            }
        }
        let flip = v[best * n + src] < 0.0;
        for r in 0..n {
            let x = v[r * n + src];
            vectors[[r, col]] = if flip { -x } else { x };
        }
    }

    Ok(EigenDecomposition {
        values,
        vectors,
        rank_tol,
    })
}

/// Operator (spectral) norm: the largest eigenvalue magnitude.
pub fn operator_norm(a: &SymMatrix) -> Result<f64, LinalgError> {
    let eig = sym_eig(a, 0.0)?;
    Ok(eig.values.iter().fold(0.0_f64, |acc, d| acc.max(d.abs())))
}

/// Projection `u^T v` of a vector onto a direction.
pub fn project(v: &[f64], u: &[f64]) -> Result<f64, LinalgError> {
    if v.len() != u.len() {
        return Err(LinalgError::DimensionMismatch {
            left: v.len(),
            right: u.len(),
        });
    }
    Ok(v.iter().zip(u).map(|(a, b)| a * b).sum())
}

/// How rows of a reference matrix are aligned before taking the kernel
/// distance `||K - Q K* Q^T||`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PermutationStrategy {
    /// No realignment: returns `||K - K*||` exactly.
    Identity,
    /// Greedy row matching driven by eigenvector coordinate profiles, with
    /// fallback to identity whenever the greedy permutation does not improve
    /// on it. The result is therefore never worse than `Identity`.
    GreedyEigMatch,
}

/// Operator-norm distance between two kernels under a row permutation of the
/// reference matrix.
pub fn aligned_kernel_distance(
    k: &SymMatrix,
    k_star: &SymMatrix,
    strategy: PermutationStrategy,
) -> Result<f64, LinalgError> {
    if k.dim() != k_star.dim() {
        return Err(LinalgError::DimensionMismatch {
            left: k.dim(),
            right: k_star.dim(),
        });
    }
    let identity_value = operator_norm(&k.sub(k_star)?)?;
    match strategy {
        PermutationStrategy::Identity => Ok(identity_value),
        PermutationStrategy::GreedyEigMatch => {
            let n = k.dim();
            let eig_k = sym_eig(k, DEFAULT_RANK_TOL)?;
            let eig_s = sym_eig(k_star, DEFAULT_RANK_TOL)?;

            // Row profiles over the leading eigenvectors; absolute values
            // sidestep the sign ambiguity of eigenvectors under permutation.
            // Rows are matched by minimal weighted profile distance, which is
            // zero for the true partner when the reference is an exact
            // permutation.
            let m = n.min(16);
            let weight: Vec<f64> = (0..m).map(|i| eig_k.values[i].abs().max(1e-300)).collect();
            let mut sigma = vec![usize::MAX; n];
            let mut used = vec![false; n];
            for row in 0..n {
                let mut best = usize::MAX;
                let mut best_dist = f64::INFINITY;
                for cand in 0..n {
                    if used[cand] {
                        continue;
                    }
                    let mut dist = 0.0;
                    for (i, w) in weight.iter().enumerate() {
                        let diff =
                            eig_k.vectors[[row, i]].abs() - eig_s.vectors[[cand, i]].abs();
                        dist += w * diff * diff;
                    }
                    if dist < best_dist {
                        best_dist = dist;
                        best = cand;
                    }
                }
                sigma[row] = best;
                used[best] = true;
            }

            let ks = k_star.as_array();
            let mut permuted = Array2::<f64>::zeros((n, n));
            for i in 0..n {
                for j in 0..n {
                    permuted[[i, j]] = ks[[sigma[i], sigma[j]]];
                }
            }
            let greedy_value = operator_norm(&k.sub(&SymMatrix { data: permuted })?)?;
            Ok(greedy_value.min(identity_value))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use ndarray::{array, Array1};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_pcg::Pcg64;

    fn random_gram(n: usize, p: usize, seed: u64) -> SymMatrix {
        let mut rng = Pcg64::seed_from_u64(seed);
        let x = Array2::from_shape_fn((n, p), |_| rng.gen_range(-1.0..1.0));
        SymMatrix::new(x.dot(&x.t())).unwrap()
    }

    fn random_symmetric(n: usize, seed: u64) -> SymMatrix {
        let mut rng = Pcg64::seed_from_u64(seed);
        let mut a = Array2::<f64>::zeros((n, n));
        for i in 0..n {
            for j in i..n {
                let v = rng.gen_range(-1.0..1.0);
                a[[i, j]] = v;
                a[[j, i]] = v;
            }
        }
        SymMatrix::new(a).unwrap()
    }

    /// Independent eigenvalue oracle for n <= 4: Durand-Kerner root finding
    /// on the characteristic polynomial, with coefficients from the
    /// Faddeev-LeVerrier recurrence.
    fn char_poly_roots(a: &SymMatrix) -> Vec<f64> {
        let n = a.dim();
        assert!(n <= 4);
        let m = a.as_array();
        let mut c = vec![0.0; n + 1];
        c[0] = 1.0;
        let mut mk = Array2::<f64>::eye(n);
        for k in 1..=n {
            mk = m.dot(&mk);
            let tr: f64 = (0..n).map(|i| mk[[i, i]]).sum();
            c[k] = -tr / k as f64;
            for i in 0..n {
                mk[[i, i]] += c[k];
            }
        }
        let eval = |re: f64, im: f64| -> (f64, f64) {
            let mut pr = 0.0;
            let mut pi = 0.0;
            for &coef in c.iter() {
                let nr = pr * re - pi * im + coef;
                let ni = pr * im + pi * re;
                pr = nr;
                pi = ni;
            }
            (pr, pi)
        };
        let scale = 1.0 + m.iter().fold(0.0_f64, |acc, v| acc.max(v.abs())) * n as f64;
        let mut roots: Vec<(f64, f64)> = (0..n)
            .map(|k| {
                let ang = 0.7 + 2.0 * std::f64::consts::PI * k as f64 / n as f64;
                (scale * ang.cos(), scale * ang.sin())
            })
            .collect();
        for _ in 0..300 {
            let prev = roots.clone();
            for i in 0..n {
                let (pr, pi) = eval(prev[i].0, prev[i].1);
                let mut dr = 1.0;
                let mut di = 0.0;
                for (j, p) in prev.iter().enumerate() {
                    if j == i {
                        continue;
                    }
                    let xr = prev[i].0 - p.0;
                    let xi = prev[i].1 - p.1;
                    let nr = dr * xr - di * xi;
                    let ni = dr * xi + di * xr;
                    dr = nr;
                    di = ni;
                }
                let denom = dr * dr + di * di;
                roots[i] = (
                    prev[i].0 - (pr * dr + pi * di) / denom,
                    prev[i].1 - (pi * dr - pr * di) / denom,
                );
            }
        }
        let mut out: Vec<f64> = roots.iter().map(|r| r.0).collect();
        out.sort_by(|x, y| y.partial_cmp(x).unwrap());
        out
    }

    #[test]
    fn identity_eigendecomposition() {
        let eye = SymMatrix::new(Array2::eye(3)).unwrap();
        let eig = sym_eig(&eye, DEFAULT_RANK_TOL).unwrap();
        assert_eq!(eig.values, vec![1.0, 1.0, 1.0]);
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert_relative_eq!(eig.vectors[[i, j]], expect, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn analytic_two_by_two() {
        let a = SymMatrix::new(array![[2.0, 1.0], [1.0, 2.0]]).unwrap();
        let eig = sym_eig(&a, DEFAULT_RANK_TOL).unwrap();
        // Characteristic polynomial (2-d)^2 = 1 gives d = 3, 1.
        assert_relative_eq!(eig.values[0], 3.0, epsilon = 1e-12);
        assert_relative_eq!(eig.values[1], 1.0, epsilon = 1e-12);
        let s = 1.0 / 2.0_f64.sqrt();
        assert_relative_eq!(eig.vectors[[0, 0]], s, epsilon = 1e-12);
        assert_relative_eq!(eig.vectors[[1, 0]], s, epsilon = 1e-12);
        assert_relative_eq!(eig.vectors[[0, 1]], s, epsilon = 1e-12);
        assert_relative_eq!(eig.vectors[[1, 1]], -s, epsilon = 1e-12);
    }

    #[test]
    fn gram_reconstruction_50() {
        let a = random_gram(50, 60, 7);
        let eig = sym_eig(&a, DEFAULT_RANK_TOL).unwrap();
        let rebuilt = eig.reconstruct();
        let num = (&rebuilt - a.as_array())
            .iter()
            .map(|v| v * v)
            .sum::<f64>()
            .sqrt();
        let den = a.frobenius_norm().max(1.0);
        assert!(num / den <= 1e-8, "relative residual {}", num / den);
    }

    #[test]
    fn orthonormal_columns() {
        let a = random_symmetric(30, 3);
        let eig = sym_eig(&a, DEFAULT_RANK_TOL).unwrap();
        let gram = eig.vectors.t().dot(&eig.vectors);
        for i in 0..30 {
            for j in 0..30 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((gram[[i, j]] - expect).abs() <= 1e-8);
            }
        }
    }

    #[test]
    fn rejects_asymmetric_input() {
        let a = array![[1.0, 2.0], [0.5, 1.0]];
        assert!(matches!(
            SymMatrix::new(a),
            Err(LinalgError::NotSymmetric { .. })
        ));
    }

    #[test]
    fn rejects_non_finite_input() {
        let a = array![[1.0, f64::NAN], [f64::NAN, 1.0]];
        assert!(matches!(
            SymMatrix::new(a),
            Err(LinalgError::NonFinite { .. })
        ));
    }

    #[test]
    fn zero_eigenvalues_snap_exactly() {
        // Rank-1 Gram matrix: one positive eigenvalue, rest exactly zero.
        let x = array![[1.0], [2.0], [3.0]];
        let a = SymMatrix::new(x.dot(&x.t())).unwrap();
        let eig = sym_eig(&a, DEFAULT_RANK_TOL).unwrap();
        assert_relative_eq!(eig.values[0], 14.0, epsilon = 1e-10);
        assert_eq!(eig.values[1], 0.0);
        assert_eq!(eig.values[2], 0.0);
        assert_eq!(eig.zero_indices(), vec![1, 2]);
        assert!(!eig.is_full_rank());
    }

    #[test]
    fn operator_norm_zero_matrix() {
        let a = SymMatrix::new(Array2::zeros((4, 4))).unwrap();
        assert_eq!(operator_norm(&a).unwrap(), 0.0);
    }

    #[test]
    fn operator_norm_diagonal_spectrum() {
        let a = SymMatrix::new(array![[3.0, 0.0], [0.0, -5.0]]).unwrap();
        assert_relative_eq!(operator_norm(&a).unwrap(), 5.0, epsilon = 1e-12);
    }

    #[test]
    fn operator_norm_matches_power_iteration() {
        let a = random_symmetric(30, 11);
        let norm = operator_norm(&a).unwrap();
        let m = a.as_array();
        let mut rng = Pcg64::seed_from_u64(99);
        let mut v = Array1::from_shape_fn(30, |_| rng.gen_range(-1.0..1.0_f64));
        let mut lambda = 0.0;
        for _ in 0..20_000 {
            let w = m.dot(&v);
            let norm_w = w.iter().map(|x| x * x).sum::<f64>().sqrt();
            lambda = norm_w / v.iter().map(|x| x * x).sum::<f64>().sqrt();
            v = w / norm_w;
        }
        assert!((norm - lambda).abs() <= 1e-10, "{norm} vs {lambda}");
    }

    #[test]
    fn project_basics() {
        let u = [1.0 / 2.0_f64.sqrt(), 1.0 / 2.0_f64.sqrt()];
        assert_relative_eq!(project(&u, &u).unwrap(), 1.0, epsilon = 1e-14);
        // Orthogonal complement built by Gram-Schmidt from (1, 0).
        let mut w = [1.0, 0.0];
        let c = project(&w, &u).unwrap();
        w[0] -= c * u[0];
        w[1] -= c * u[1];
        assert!(project(&w, &u).unwrap().abs() <= 1e-12);
        // Orthonormal expansion v = 2 u1 + 3 u2.
        let u1 = [1.0, 0.0];
        let u2 = [0.0, 1.0];
        let v = [2.0, 3.0];
        assert_relative_eq!(project(&v, &u1).unwrap(), 2.0);
        assert_relative_eq!(project(&v, &u2).unwrap(), 3.0);
    }

    #[test]
    fn project_rejects_length_mismatch() {
        assert!(project(&[1.0, 2.0], &[1.0]).is_err());
    }

    #[test]
    fn char_poly_oracle_small_matrices() {
        for n in 1..=4usize {
            for seed in 0..25u64 {
                let a = random_gram(n, n + 2, 1000 + seed * 7 + n as u64);
                let eig = sym_eig(&a, 0.0).unwrap();
                let oracle = char_poly_roots(&a);
                for (got, want) in eig.values.iter().zip(&oracle) {
                    assert!(
                        (got - want).abs() <= 1e-8 * want.abs().max(1.0),
                        "n={n} seed={seed}: {got} vs {want}"
                    );
                }
            }
        }
    }

    #[test]
    fn aligned_distance_identical_kernels() {
        let a = random_gram(12, 15, 21);
        assert_eq!(
            aligned_kernel_distance(&a, &a, PermutationStrategy::Identity).unwrap(),
            0.0
        );
    }

    #[test]
    fn aligned_distance_recovers_permutation() {
        let a = random_gram(10, 14, 5);
        let n = a.dim();
        // Reference is a row/column permutation of a.
        let perm: Vec<usize> = vec![3, 1, 4, 0, 2, 9, 7, 5, 8, 6];
        let mut shuffled = Array2::<f64>::zeros((n, n));
        for i in 0..n {
            for j in 0..n {
                shuffled[[i, j]] = a.as_array()[[perm[i], perm[j]]];
            }
        }
        let k_star = SymMatrix::new(shuffled).unwrap();
        let identity = aligned_kernel_distance(&a, &k_star, PermutationStrategy::Identity).unwrap();
        let greedy =
            aligned_kernel_distance(&a, &k_star, PermutationStrategy::GreedyEigMatch).unwrap();
        assert!(greedy <= identity, "greedy {greedy} > identity {identity}");
        assert!(greedy <= 1e-8, "expected near-exact recovery, got {greedy}");
    }

    #[test]
    fn aligned_distance_rank_one_perturbation() {
        let a = random_gram(20, 25, 8);
        let n = a.dim();
        let mut rng = Pcg64::seed_from_u64(17);
        let mut v = Array1::from_shape_fn(n, |_| rng.gen_range(-1.0..1.0_f64));
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.mapv_inplace(|x| x / norm);
        let mut perturbed = a.as_array().clone();
        for i in 0..n {
            for j in 0..n {
                perturbed[[i, j]] += 0.1 * v[i] * v[j];
            }
        }
        let k_star = SymMatrix::new(perturbed).unwrap();
        let d = aligned_kernel_distance(&a, &k_star, PermutationStrategy::Identity).unwrap();
        assert!((d - 0.1).abs() <= 1e-10, "got {d}");
    }

    #[test]
    fn deterministic_bit_identical() {
        let a = random_symmetric(40, 123);
        let e1 = sym_eig(&a, DEFAULT_RANK_TOL).unwrap();
        let e2 = sym_eig(&a, DEFAULT_RANK_TOL).unwrap();
        assert_eq!(e1.values, e2.values);
        assert_eq!(e1.vectors, e2.vectors);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn trace_is_preserved(seed in 0u64..5000, n in 2usize..24) {
            let a = random_gram(n, n + 3, seed);
            let eig = sym_eig(&a, 0.0).unwrap();
            let trace: f64 = (0..n).map(|i| a.as_array()[[i, i]]).sum();
            let sum: f64 = eig.values.iter().sum();
            prop_assert!((trace - sum).abs() <= 1e-8 * trace.abs().max(1.0));
        }

        #[test]
        fn operator_norm_triangle_inequality(seed in 0u64..5000, n in 2usize..16) {
            let a = random_symmetric(n, seed);
            let b = random_symmetric(n, seed ^ 0xabcdef);
            let sum = SymMatrix::new(a.as_array() + b.as_array()).unwrap();
            let lhs = operator_norm(&sum).unwrap();
            let rhs = operator_norm(&a).unwrap() + operator_norm(&b).unwrap();
            prop_assert!(lhs <= rhs + 1e-10);
        }

        #[test]
        fn eigenvalues_sorted_and_reconstruct(seed in 0u64..5000, n in 2usize..20) {
            let a = random_gram(n, n + 1, seed);
            let eig = sym_eig(&a, DEFAULT_RANK_TOL).unwrap();
            for w in eig.values.windows(2) {
                prop_assert!(w[0] >= w[1]);
            }
            let rebuilt = eig.reconstruct();
            let num = (&rebuilt - a.as_array()).iter().map(|v| v * v).sum::<f64>().sqrt();
            prop_assert!(num <= 1e-8 * a.frobenius_norm().max(1.0));
        }
    }
}

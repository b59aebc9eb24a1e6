//! One-sided Jacobi singular value decomposition.
//!
//! Jacobi was picked over bidiagonalization because it is short, fully
//! deterministic, and its termination criterion directly bounds the
//! orthogonality of the computed singular vectors: the sweep loop only exits
//! once every column pair satisfies |⟨a_p, a_q⟩| ≤ tol·‖a_p‖‖a_q‖, so the
//! normalized left vectors are pairwise orthogonal to ~tol regardless of the
//! spread of the singular values. Accuracy is more than the pipeline needs;
//! speed is adequate for the matrix sizes in scope (a few hundred columns).

use crate::error::{Error, Result};
use crate::matrix::{dot_slices, Matrix};

/// Thin SVD `M = left · diag(singulars) · rightᵀ` with `k = min(rows, cols)`.
#[derive(Debug, Clone)]
pub struct SvdResult {
    /// m×k, orthonormal columns.
    pub left: Matrix,
    /// Nonincreasing, nonnegative, length k.
    pub singulars: Vec<f64>,
    /// n×k, orthonormal columns.
    pub right: Matrix,
}

impl SvdResult {
    /// `left · diag(singulars) · rightᵀ`, for reconstruction checks.
    pub fn reconstruct(&self) -> Matrix {
        let k = self.singulars.len();
        let mut scaled = self.left.clone();
        for j in 0..k {
            for i in 0..scaled.rows() {
                scaled[(i, j)] *= self.singulars[j];
            }
        }
        scaled.dot_transpose(&self.right)
    }

    /// Columns with σ strictly above `rel_tol · σ_max` (the numerical rank).
    pub fn rank(&self, rel_tol: f64) -> usize {
        let smax = self.singulars.first().copied().unwrap_or(0.0);
        self.singulars
            .iter()
            .filter(|&&s| s > rel_tol * smax)
            .count()
    }
}

const MAX_SWEEPS: usize = 100;
/// A column pair is considered orthogonal when |⟨a_p,a_q⟩| ≤ TOL·‖a_p‖‖a_q‖.
const PAIR_TOL: f64 = 1e-14;

/// Thin SVD of an arbitrary dense matrix.
///
/// Deterministic for a fixed input. Fails only if the sweep cap is exhausted,
/// which does not happen for finite inputs of the sizes in scope.
pub fn svd(m: &Matrix) -> Result<SvdResult> {
    if m.rows() >= m.cols() {
        svd_tall(m)
    } else {
        // M = (Mᵀ)ᵀ: factor the transpose and swap the singular vector sides.
        let t = svd_tall(&m.transpose())?;
        Ok(SvdResult {
            left: t.right,
            singulars: t.singulars,
            right: t.left,
        })
    }
}

/// Moore–Penrose pseudoinverse via the SVD.
///
/// Singular values ≤ `rel_tol · σ_max` are treated as exact zeros; `None`
/// picks the standard cutoff `1e-12 · max(rows, cols)`.
// `!(tol > 0.0)` rather than `tol <= 0.0`: a NaN cutoff must also be an error.
#[allow(clippy::neg_cmp_op_on_partial_ord)]
pub fn pseudoinverse(m: &Matrix, rel_tol: Option<f64>) -> Result<Matrix> {
    let tol = rel_tol.unwrap_or(1e-12 * m.rows().max(m.cols()) as f64);
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "pseudoinverse cutoff must be > 0, got {tol}"
        )));
    }
    let f = svd(m)?;
    let smax = f.singulars.first().copied().unwrap_or(0.0);
    // M⁺ = right · diag(1/σ over the kept range) · leftᵀ
    let mut scaled = f.right.clone(); // n×k
    for (j, &s) in f.singulars.iter().enumerate() {
        let inv = if s > tol * smax { 1.0 / s } else { 0.0 };
        for i in 0..scaled.rows() {
            scaled[(i, j)] *= inv;
        }
    }
    Ok(scaled.dot_transpose(&f.left))
}

/// Column-major scratch storage: Jacobi rotations act on column pairs, which
/// are contiguous slices here.
struct ColMajor {
    rows: usize,
    data: Vec<f64>,
}

impl ColMajor {
    fn from_matrix(m: &Matrix) -> Self {
        let (rows, cols) = (m.rows(), m.cols());
        let mut data = vec![0.0; rows * cols];
        for i in 0..rows {
            for j in 0..cols {
                data[j * rows + i] = m[(i, j)];
            }
        }
        ColMajor { rows, data }
    }

    fn identity(n: usize) -> Self {
        let mut s = ColMajor {
            rows: n,
            data: vec![0.0; n * n],
        };
        for i in 0..n {
            s.data[i * n + i] = 1.0;
        }
        s
    }

    fn col(&self, j: usize) -> &[f64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    /// Apply the rotation (p', q') = (c·p − s·q, s·p + c·q) to columns p < q.
    fn rotate(&mut self, p: usize, q: usize, c: f64, s: f64) {
        let (head, tail) = self.data.split_at_mut(q * self.rows);
        let cp = &mut head[p * self.rows..(p + 1) * self.rows];
        let cq = &mut tail[..self.rows];
        for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
            let (xp, xq) = (*x, *y);
            *x = c * xp - s * xq;
            *y = s * xp + c * xq;
        }
    }
}

fn svd_tall(a: &Matrix) -> Result<SvdResult> {
    let (m, n) = (a.rows(), a.cols());
    debug_assert!(m >= n);
    let mut w = ColMajor::from_matrix(a);
    let mut v = ColMajor::identity(n);
    // Squared column norms, kept up to date across rotations; recomputing the
    // two rotated columns exactly keeps drift out of the rotation decisions.
    let mut sq: Vec<f64> = (0..n).map(|j| norm_sq(w.col(j))).collect();

    let mut converged = false;
    for _sweep in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n.saturating_sub(1) {
            for q in p + 1..n {
                let apq = dot_slices(w.col(p), w.col(q));
                if apq.abs() <= PAIR_TOL * (sq[p] * sq[q]).sqrt() {
                    continue; // already orthogonal (covers exactly-zero columns)
                }
                rotated = true;
                let zeta = (sq[q] - sq[p]) / (2.0 * apq);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                w.rotate(p, q, c, s);
                v.rotate(p, q, c, s);
                sq[p] = norm_sq(w.col(p));
                sq[q] = norm_sq(w.col(q));
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Numerical(format!(
            "svd did not converge within {MAX_SWEEPS} sweeps on a {m}x{n} matrix"
        )));
    }

    // Singular values are the rotated column norms; order them nonincreasing
    // (stable: ties keep the lower original index first).
    let sigmas: Vec<f64> = (0..n).map(|j| norm_sq(w.col(j)).sqrt()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| sigmas[j].partial_cmp(&sigmas[i]).unwrap().then(i.cmp(&j)));

    let mut left = Matrix::zeros(m, n);
    let mut right = Matrix::zeros(n, n);
    let mut singulars = Vec::with_capacity(n);
    let mut null_cols = Vec::new();
    for (dst, &src) in order.iter().enumerate() {
        let sigma = sigmas[src];
        singulars.push(sigma);
        if sigma == 0.0 {
            null_cols.push(dst); // direction undefined; fill in afterwards
        } else {
            let col = w.col(src);
            for i in 0..m {
                left[(i, dst)] = col[i] / sigma;
            }
        }
        let vc = v.col(src);
        for i in 0..n {
            right[(i, dst)] = vc[i];
        }
    }
    if !null_cols.is_empty() {
        complete_basis(&mut left, &null_cols);
    }

    Ok(SvdResult {
        left,
        singulars,
        right,
    })
}

fn norm_sq(c: &[f64]) -> f64 {
    let mut s = 0.0;
    for &x in c {
        s += x * x;
    }
    s
}

/// Fill the listed columns with unit vectors orthogonal to every other column
/// (Gram–Schmidt over the standard basis, re-orthogonalized once). Only runs
/// for exactly-zero singular values, where the reconstruction is insensitive
/// to the direction chosen.
fn complete_basis(left: &mut Matrix, fill: &[usize]) {
    let m = left.rows();
    let k = left.cols();
    let mut filled: Vec<usize> = (0..k).filter(|j| !fill.contains(j)).collect();
    let mut candidate = 0usize;
    for &dst in fill {
        loop {
            assert!(
                candidate < m,
                "ran out of basis candidates during completion"
            );
            let mut v = vec![0.0; m];
            v[candidate] = 1.0;
            candidate += 1;
            for _ in 0..2 {
                for &j in &filled {
                    let mut proj = 0.0;
                    for i in 0..m {
                        proj += left[(i, j)] * v[i];
                    }
                    for i in 0..m {
                        v[i] -= proj * left[(i, j)];
                    }
                }
            }
            let norm = norm_sq(&v).sqrt();
            if norm > 0.5 {
                for i in 0..m {
                    left[(i, dst)] = v[i] / norm;
                }
                filled.push(dst);
                break;
            }
            // candidate was (nearly) inside the current span; try the next one
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn mat(rows: usize, cols: usize, v: &[f64]) -> Matrix {
        Matrix::from_vec(rows, cols, v.to_vec()).unwrap()
    }

    fn assert_factorization(m: &Matrix, tol: f64) {
        let f = svd(m).unwrap();
        let k = m.rows().min(m.cols());
        assert_eq!(f.singulars.len(), k);
        assert!(f.singulars.windows(2).all(|w| w[0] >= w[1]), "not sorted");
        assert!(f.singulars.iter().all(|&s| s >= 0.0));
        let ltl = f.left.gram();
        let rtr = f.right.gram();
        let eye = Matrix::identity(k);
        assert!((&ltl - &eye).max_abs() < 1e-10, "left not orthonormal");
        assert!((&rtr - &eye).max_abs() < 1e-10, "right not orthonormal");
        let err = (&f.reconstruct() - m).frobenius_norm();
        assert!(
            err <= tol * (1.0 + m.frobenius_norm()),
            "reconstruction {err}"
        );
    }

    #[test]
    fn identity_and_diagonal() {
        let f = svd(&Matrix::identity(3)).unwrap();
        for &s in &f.singulars {
            assert!((s - 1.0).abs() < 1e-14);
        }
        let d = mat(3, 3, &[5.0, 0.0, 0.0, 0.0, 3.0, 0.0, 0.0, 0.0, 1.0]);
        let f = svd(&d).unwrap();
        assert!((f.singulars[0] - 5.0).abs() < 1e-12);
        assert!((f.singulars[1] - 3.0).abs() < 1e-12);
        assert!((f.singulars[2] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn antidiagonal_exchange_matrix() {
        let m = mat(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let f = svd(&m).unwrap();
        assert!((f.singulars[0] - 1.0).abs() < 1e-14);
        assert!((f.singulars[1] - 1.0).abs() < 1e-14);
        assert!((&f.reconstruct() - &m).max_abs() <= 1e-12);
    }

    #[test]
    fn random_shapes_and_rank_deficiency() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for &(r, c) in &[(7, 7), (10, 4), (4, 10), (25, 25), (50, 13)] {
            let m = Matrix::from_fn(r, c, |_, _| rng.random_range(-1.0..1.0));
            assert_factorization(&m, 1e-8);
        }
        // exact rank deficiency: outer product plus a zero block
        let u = Matrix::from_fn(6, 2, |_, _| rng.random_range(-1.0..1.0));
        let v = Matrix::from_fn(2, 5, |_, _| rng.random_range(-1.0..1.0));
        let low = u.dot(&v);
        assert_factorization(&low, 1e-8);
        let f = svd(&low).unwrap();
        assert!(f.singulars[2] < 1e-10 * f.singulars[0]);
        assert_eq!(f.rank(1e-8), 2);
    }

    #[test]
    fn zero_matrix_has_orthonormal_factors() {
        assert_factorization(&Matrix::zeros(4, 3), 1e-14);
        let f = svd(&Matrix::zeros(4, 3)).unwrap();
        assert!(f.singulars.iter().all(|&s| s == 0.0));
    }

    #[test]
    fn svd_is_bitwise_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = Matrix::from_fn(12, 9, |_, _| rng.random_range(-2.0..2.0));
        let a = svd(&m).unwrap();
        let b = svd(&m).unwrap();
        assert_eq!(a.left, b.left);
        assert_eq!(a.singulars, b.singulars);
        assert_eq!(a.right, b.right);
    }

    #[test]
    fn pseudoinverse_of_isometry_is_transpose() {
        // Q from the SVD of a random tall matrix has orthonormal columns.
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let m = Matrix::from_fn(8, 3, |_, _| rng.random_range(-1.0..1.0));
        let q = svd(&m).unwrap().left;
        let p = pseudoinverse(&q, None).unwrap();
        assert!((&p - &q.transpose()).max_abs() < 1e-10);
    }

    #[test]
    fn pseudoinverse_keeps_exact_zeros() {
        let m = mat(2, 2, &[2.0, 0.0, 0.0, 0.0]);
        let p = pseudoinverse(&m, None).unwrap();
        assert!((p[(0, 0)] - 0.5).abs() < 1e-14);
        assert_eq!(p[(0, 1)], 0.0);
        assert_eq!(p[(1, 0)], 0.0);
        assert_eq!(p[(1, 1)], 0.0);
        let z = pseudoinverse(&Matrix::zeros(3, 5), None).unwrap();
        assert_eq!(z.rows(), 5);
        assert_eq!(z.cols(), 3);
        assert_eq!(z.max_abs(), 0.0);
    }

    #[test]
    fn pseudoinverse_satisfies_penrose_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let m = Matrix::from_fn(9, 6, |_, _| rng.random_range(-1.0..1.0));
        let p = pseudoinverse(&m, None).unwrap();
        let back = m.dot(&p).dot(&m);
        assert!((&back - &m).frobenius_norm() <= 1e-8 * (1.0 + m.frobenius_norm()));
    }
}

//! Cyclic Jacobi eigendecomposition for symmetric matrices.

use crate::error::{Error, Result};
use crate::matrix::Matrix;

const MAX_SWEEPS: usize = 100;

/// Full eigendecomposition of a symmetric matrix.
///
/// The input is symmetrized as `(M + Mᵀ)/2` first, so mild asymmetry from
/// accumulated rounding is tolerated. Returns eigenvalues sorted
/// nonincreasing and the matching eigenvectors as columns (orthonormal, since
/// they are an accumulated product of plane rotations).
pub fn symmetric_eig(m: &Matrix) -> Result<(Vec<f64>, Matrix)> {
    if m.rows() != m.cols() {
        return Err(Error::DimensionMismatch(format!(
            "symmetric_eig needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let n = m.rows();
    let mut a = Matrix::from_fn(n, n, |i, j| 0.5 * (m[(i, j)] + m[(j, i)]));
    let mut vecs = Matrix::identity(n);
    let fro = a.frobenius_norm();
    let tol = 1e-12 * fro;

    let mut converged = fro == 0.0;
    for _sweep in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        if off_diagonal_norm(&a) <= tol {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (1.0 + theta * theta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                apply_rotation(&mut a, p, q, c, s, t);
                for i in 0..n {
                    let vip = vecs[(i, p)];
                    let viq = vecs[(i, q)];
                    vecs[(i, p)] = c * vip - s * viq;
                    vecs[(i, q)] = s * vip + c * viq;
                }
            }
        }
    }
    if !converged && off_diagonal_norm(&a) > tol {
        return Err(Error::Numerical(format!(
            "symmetric_eig did not converge within {MAX_SWEEPS} sweeps (n = {n})"
        )));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].partial_cmp(&a[(i, i)]).unwrap().then(i.cmp(&j)));
    let values: Vec<f64> = order.iter().map(|&i| a[(i, i)]).collect();
    let vectors = vecs.select_columns(&order);
    Ok((values, vectors))
}

fn off_diagonal_norm(a: &Matrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for p in 0..n {
        for q in p + 1..n {
            s += 2.0 * a[(p, q)] * a[(p, q)];
        }
    }
    s.sqrt()
}

/// Similarity rotation on rows/columns p and q, zeroing a_pq exactly.
fn apply_rotation(a: &mut Matrix, p: usize, q: usize, c: f64, s: f64, t: f64) {
    let n = a.rows();
    let apq = a[(p, q)];
    let app = a[(p, p)];
    let aqq = a[(q, q)];
    a[(p, p)] = app - t * apq;
    a[(q, q)] = aqq + t * apq;
    a[(p, q)] = 0.0;
    a[(q, p)] = 0.0;
    for i in 0..n {
        if i == p || i == q {
            continue;
        }
        let aip = a[(i, p)];
        let aiq = a[(i, q)];
        let new_p = c * aip - s * aiq;
        let new_q = s * aip + c * aiq;
        a[(i, p)] = new_p;
        a[(p, i)] = new_p;
        a[(i, q)] = new_q;
        a[(q, i)] = new_q;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_has_unit_spectrum() {
        let (vals, _) = symmetric_eig(&Matrix::identity(4)).unwrap();
        for &v in &vals {
            assert!((v - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn diagonal_matrix_keeps_axis_vectors() {
        let d = Matrix::from_vec(2, 2, vec![3.0, 0.0, 0.0, 1.0]).unwrap();
        let (vals, vecs) = symmetric_eig(&d).unwrap();
        assert_eq!(vals, vec![3.0, 1.0]);
        assert!((vecs[(0, 0)].abs() - 1.0).abs() < 1e-14);
        assert!((vecs[(1, 1)].abs() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn two_by_two_hand_oracle() {
        // [[2,1],[1,2]] has eigenvalues 3 and 1 (char. poly (2−λ)² = 1)
        let m = Matrix::from_vec(2, 2, vec![2.0, 1.0, 1.0, 2.0]).unwrap();
        let (vals, vecs) = symmetric_eig(&m).unwrap();
        assert!((vals[0] - 3.0).abs() < 1e-12);
        assert!((vals[1] - 1.0).abs() < 1e-12);
        // residual M·v = λ·v
        for j in 0..2 {
            for i in 0..2 {
                let mv = m[(i, 0)] * vecs[(0, j)] + m[(i, 1)] * vecs[(1, j)];
                assert!((mv - vals[j] * vecs[(i, j)]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn random_symmetric_residual_and_orthonormality() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for &n in &[5usize, 12, 30] {
            let g = Matrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
            let m = &g + &g.transpose();
            let (vals, vecs) = symmetric_eig(&m).unwrap();
            assert!(vals.windows(2).all(|w| w[0] >= w[1]));
            let vtv = vecs.gram();
            assert!((&vtv - &Matrix::identity(n)).max_abs() < 1e-10);
            let mv = m.dot(&vecs);
            for j in 0..n {
                for i in 0..n {
                    let lv = vals[j] * vecs[(i, j)];
                    assert!((mv[(i, j)] - lv).abs() <= 1e-8 * (1.0 + m.frobenius_norm()));
                }
            }
        }
    }

    #[test]
    fn rejects_rectangular_input() {
        assert!(symmetric_eig(&Matrix::zeros(2, 3)).is_err());
    }
}

//! Cholesky factorization and multi-right-hand-side SPD solves.

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Solve `A · X = B` for symmetric positive definite `A` via `A = L·Lᵀ`.
///
/// The caller guarantees SPD-ness (the solver's normal matrix
/// `μ_V·I + β·UᵀU` is SPD by construction for `μ_V > 0`); a non-positive
/// pivot is reported as a numerical error rather than silently patched.
///
/// All elimination sums run over the contraction index in increasing order,
/// so an exactly-zero row/column pair of `A` (paired with a zero row of `B`)
/// passes through as an exactly-zero row of the solution — the pruning
/// equivalence of the accelerated solver depends on this.
// `!(d > 0.0)` rather than `d <= 0.0`: a NaN pivot must also be an error.
#[allow(clippy::neg_cmp_op_on_partial_ord)]
pub fn solve_spd(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    let n = a.rows();
    if a.cols() != n {
        return Err(Error::DimensionMismatch(format!(
            "solve_spd needs square A, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    if b.rows() != n {
        return Err(Error::DimensionMismatch(format!(
            "solve_spd: A is {}x{} but B has {} rows",
            n,
            n,
            b.rows()
        )));
    }

    // Lower-triangular factor, row-major; strictly-upper part stays zero.
    let mut l = Matrix::zeros(n, n);
    for j in 0..n {
        let mut d = a[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if !(d > 0.0) {
            return Err(Error::Numerical(format!(
                "matrix is not positive definite (pivot {j} = {d:e})"
            )));
        }
        let ljj = d.sqrt();
        l[(j, j)] = ljj;
        for i in j + 1..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / ljj;
        }
    }

    // Forward solve L·Y = B, processed as whole-row operations.
    let mut x = b.clone();
    for i in 0..n {
        for k in 0..i {
            let lik = l[(i, k)];
            let (done, rest) = x.data_mut().split_at_mut(i * b.cols());
            let xk = &done[k * b.cols()..(k + 1) * b.cols()];
            let xi = &mut rest[..b.cols()];
            for (v, &y) in xi.iter_mut().zip(xk) {
                *v -= lik * y;
            }
        }
        let inv = 1.0 / l[(i, i)];
        for v in x.row_mut(i) {
            *v *= inv;
        }
    }
    // Back solve Lᵀ·X = Y.
    for i in (0..n).rev() {
        for k in i + 1..n {
            let lki = l[(k, i)];
            let (head, tail) = x.data_mut().split_at_mut(k * b.cols());
            let xi = &mut head[i * b.cols()..(i + 1) * b.cols()];
            let xk = &tail[..b.cols()];
            for (v, &y) in xi.iter_mut().zip(xk) {
                *v -= lki * y;
            }
        }
        let inv = 1.0 / l[(i, i)];
        for v in x.row_mut(i) {
            *v *= inv;
        }
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_system_returns_rhs() {
        let b = Matrix::from_vec(3, 2, vec![1.0, -2.0, 0.5, 3.0, 4.0, -1.0]).unwrap();
        let x = solve_spd(&Matrix::identity(3), &b).unwrap();
        assert_eq!(x, b);
    }

    #[test]
    fn diagonal_solve() {
        let a = Matrix::from_vec(2, 2, vec![2.0, 0.0, 0.0, 4.0]).unwrap();
        let b = Matrix::from_vec(2, 1, vec![2.0, 8.0]).unwrap();
        let x = solve_spd(&a, &b).unwrap();
        assert!((x[(0, 0)] - 1.0).abs() < 1e-15);
        assert!((x[(1, 0)] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn random_spd_residual_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for &n in &[5usize, 20, 50] {
            let g = Matrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
            let a = &g.dot(&g.transpose()) + &Matrix::identity(n); // GGᵀ + I is SPD
            let b = Matrix::from_fn(n, 3, |_, _| rng.random_range(-1.0..1.0));
            let x = solve_spd(&a, &b).unwrap();
            let resid = (&a.dot(&x) - &b).frobenius_norm();
            assert!(
                resid <= 1e-8 * (1.0 + b.frobenius_norm()),
                "n={n} resid={resid}"
            );
        }
    }

    #[test]
    fn indefinite_matrix_is_rejected() {
        let a = Matrix::from_vec(2, 2, vec![1.0, 0.0, 0.0, -1.0]).unwrap();
        let b = Matrix::zeros(2, 1);
        assert!(matches!(solve_spd(&a, &b), Err(Error::Numerical(_))));
    }

    #[test]
    fn zero_cross_terms_give_zero_solution_rows() {
        // A with an exactly-zero off-diagonal row/col (diagonal entry kept)
        // and a zero RHS row: the solution row must be exactly zero.
        let mut a = Matrix::identity(3);
        a[(0, 0)] = 2.5;
        a[(2, 2)] = 4.0;
        a[(0, 2)] = 0.75;
        a[(2, 0)] = 0.75;
        let mut b = Matrix::zeros(3, 2);
        b[(0, 0)] = 1.0;
        b[(2, 1)] = -2.0;
        let x = solve_spd(&a, &b).unwrap();
        assert_eq!(x[(1, 0)], 0.0);
        assert_eq!(x[(1, 1)], 0.0);
    }
}

//! Largest squared singular value by power iteration.

use crate::matrix::Matrix;

const MAX_ITER: usize = 10_000;
/// Relative flatness of the Rayleigh quotient at which iteration stops.
const REL_TOL: f64 = 1e-11;

/// σ²_max(M), the largest eigenvalue of MᵀM.
///
/// Power iteration on MᵀM with the Rayleigh quotient ‖M·v‖² as the estimate;
/// the iterate lives in column space (length `cols`), started from the
/// standard basis vector of the column with the largest norm. The estimate is
/// monotone nondecreasing, so stopping on a flat step is sound; matrices with
/// σ₁ ≈ σ₂ stall close to the limit, within the slack the solver's 1.02
/// step-size factor exists to absorb.
///
/// The solver calls this on V while pruning rows of V mid-run. Deleting
/// exactly-zero rows drops only exact-zero terms from every inner sum here —
/// the iterate's length does not change — so the returned value is identical
/// before and after a prune.
pub fn spectral_norm_sq(m: &Matrix) -> f64 {
    let n = m.cols();
    let mut jmax = 0usize;
    let mut best = 0.0f64;
    for j in 0..n {
        let s = m.col_sq_norm(j);
        if s > best {
            best = s;
            jmax = j;
        }
    }
    if best == 0.0 {
        return 0.0; // zero matrix
    }

    let mut v = vec![0.0f64; n];
    v[jmax] = 1.0;
    let mut lambda = 0.0f64;
    for _ in 0..MAX_ITER {
        // w = M·v, λ = ‖w‖² (v is unit), z = Mᵀ·w
        let mut w = vec![0.0f64; m.rows()];
        for (i, wi) in w.iter_mut().enumerate() {
            let row = m.row(i);
            let mut s = 0.0;
            for (&a, &b) in row.iter().zip(&v) {
                s += a * b;
            }
            *wi = s;
        }
        let new_lambda: f64 = w.iter().map(|&x| x * x).sum();
        let mut z = vec![0.0f64; n];
        for (i, &wi) in w.iter().enumerate() {
            let row = m.row(i);
            for (zj, &a) in z.iter_mut().zip(row) {
                *zj += a * wi;
            }
        }
        let znorm = z.iter().map(|&x| x * x).sum::<f64>().sqrt();
        let done = (new_lambda - lambda).abs() <= REL_TOL * new_lambda;
        lambda = new_lambda;
        if done || znorm == 0.0 {
            break;
        }
        for (vi, &zi) in v.iter_mut().zip(&z) {
            *vi = zi / znorm;
        }
    }
    lambda
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::svd;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn known_values() {
        assert!((spectral_norm_sq(&Matrix::identity(3)) - 1.0).abs() < 1e-12);
        let m = Matrix::from_vec(2, 2, vec![0.0, 2.0, 0.0, 0.0]).unwrap();
        assert!((spectral_norm_sq(&m) - 4.0).abs() < 1e-12);
        assert_eq!(spectral_norm_sq(&Matrix::zeros(3, 2)), 0.0);
    }

    #[test]
    fn agrees_with_svd_route() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let m = Matrix::from_fn(10, 7, |_, _| rng.random_range(-1.0..1.0));
        let via_power = spectral_norm_sq(&m);
        let via_svd = svd(&m).unwrap().singulars[0].powi(2);
        assert!(
            (via_power - via_svd).abs() <= 1e-8 * via_svd,
            "power {via_power} vs svd {via_svd}"
        );
    }

    #[test]
    fn invariant_to_deleting_zero_rows() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        let mut m = Matrix::from_fn(6, 8, |_, _| rng.random_range(-1.0..1.0));
        for j in 0..8 {
            m[(2, j)] = 0.0;
            m[(5, j)] = 0.0;
        }
        let full = spectral_norm_sq(&m);
        let pruned = spectral_norm_sq(&m.select_rows(&[0, 1, 3, 4]));
        assert_eq!(full.to_bits(), pruned.to_bits());
    }
}

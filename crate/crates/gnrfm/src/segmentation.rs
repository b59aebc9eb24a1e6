//! From a factorization to a segmentation: recover the representation
//! matrix Z, turn it into a symmetric nonnegative affinity, and cluster the
//! affinity graph with normalized cuts (spectral embedding + k-means).

use crate::error::{Error, Result};
use crate::kmeans::kmeans;
use crate::linalg::{pseudoinverse, svd, symmetric_eig};
use crate::matrix::Matrix;

/// Low-rank representation implied by X ≈ UV + E: `Z = (X⁺·U)·V`, so that
/// X·Z ≈ UV is the clean part of the data expressed in its own column space.
pub fn recover_z(x: &Matrix, u: &Matrix, v: &Matrix) -> Result<Matrix> {
    if u.rows() != x.rows() {
        return Err(Error::DimensionMismatch(format!(
            "U has {} rows but X has {}",
            u.rows(),
            x.rows()
        )));
    }
    if v.cols() != x.cols() {
        return Err(Error::DimensionMismatch(format!(
            "V has {} columns but X has {}",
            v.cols(),
            x.cols()
        )));
    }
    let pinv = pseudoinverse(x, None)?;
    Ok(pinv.dot(u).dot(v))
}

/// Square, symmetric, nonnegative, finite affinity over data columns.
#[derive(Debug, Clone)]
pub struct AffinityMatrix(Matrix);

impl AffinityMatrix {
    /// Validate and canonicalize: entries must be finite and nonnegative,
    /// the matrix square with relative asymmetry at most 1e-10; whatever
    /// asymmetry remains is averaged away so the stored matrix is exactly
    /// symmetric.
    pub fn new(w: Matrix) -> Result<Self> {
        if w.rows() != w.cols() {
            return Err(Error::DimensionMismatch(format!(
                "affinity must be square, got {}×{}",
                w.rows(),
                w.cols()
            )));
        }
        if !w.all_finite() {
            return Err(Error::InvalidParameter("affinity contains NaN/Inf".into()));
        }
        let scale = 1.0 + w.max_abs();
        let mut sym = Matrix::zeros(w.rows(), w.rows());
        for i in 0..w.rows() {
            for j in i..w.rows() {
                let (a, b) = (w[(i, j)], w[(j, i)]);
                if a < 0.0 || b < 0.0 {
                    return Err(Error::InvalidParameter(format!(
                        "affinity has a negative entry at ({i},{j})"
                    )));
                }
                if (a - b).abs() > 1e-10 * scale {
                    return Err(Error::InvalidParameter(format!(
                        "affinity is not symmetric at ({i},{j}): {a} vs {b}"
                    )));
                }
                let value = 0.5 * (a + b);
                sym[(i, j)] = value;
                sym[(j, i)] = value;
            }
        }
        Ok(AffinityMatrix(sym))
    }

    pub fn as_matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn n(&self) -> usize {
        self.0.rows()
    }
}

/// Affinity from the skinny SVD of Z: with Z = Û·Σ̂·V̂ᵀ truncated at
/// σ > rank_tol·σ_max, set M = Û·Σ̂^{1/2}, normalize its rows, and square the
/// resulting angular similarity entrywise: w_ij = (m_i·m_j)². Rows of zero
/// norm (columns untouched by the representation) keep zero affinity.
/// A sensible default for `rank_tol` is 1e-8.
pub fn build_affinity_squared(z: &Matrix, rank_tol: f64) -> Result<AffinityMatrix> {
    if z.rows() != z.cols() {
        return Err(Error::DimensionMismatch(format!(
            "representation must be square, got {}×{}",
            z.rows(),
            z.cols()
        )));
    }
    if !(rank_tol > 0.0 && rank_tol < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "rank_tol must lie in (0,1), got {rank_tol}"
        )));
    }
    if z.max_abs() == 0.0 {
        return Err(Error::InvalidParameter(
            "representation is identically zero; no structure to cluster".into(),
        ));
    }
    let n = z.rows();
    let f = svd(z)?;
    let r = f.rank(rank_tol).max(1);
    let mut m = Matrix::zeros(n, r);
    for j in 0..r {
        let root = f.singulars[j].sqrt();
        for i in 0..n {
            m[(i, j)] = f.left[(i, j)] * root;
        }
    }
    for i in 0..n {
        let norm: f64 = m.row(i).iter().map(|&x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            log::warn!("representation row {i} is zero; its affinities stay zero");
            continue;
        }
        for j in 0..r {
            m[(i, j)] /= norm;
        }
    }
    let mut w = Matrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let dot = crate::matrix::dot_slices(m.row(i), m.row(j));
            let value = dot * dot;
            w[(i, j)] = value;
            w[(j, i)] = value;
        }
    }
    AffinityMatrix::new(w)
}

/// Plain magnitude affinity w_ij = (|z_ij| + |z_ji|)/2.
pub fn build_affinity_abs(z: &Matrix) -> Result<AffinityMatrix> {
    if z.rows() != z.cols() {
        return Err(Error::DimensionMismatch(format!(
            "representation must be square, got {}×{}",
            z.rows(),
            z.cols()
        )));
    }
    let n = z.rows();
    let mut w = Matrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let value = 0.5 * (z[(i, j)].abs() + z[(j, i)].abs());
            w[(i, j)] = value;
            w[(j, i)] = value;
        }
    }
    AffinityMatrix::new(w)
}

/// Normalized-cuts clustering of an affinity graph: embed each node with the
/// eigenvectors of the k smallest eigenvalues of the symmetric normalized
/// Laplacian L = I − D^{-1/2}·W·D^{-1/2}, normalize the embedding rows, and
/// run seeded k-means on them.
pub fn ncut_cluster(w: &AffinityMatrix, k: usize, seed: u64) -> Result<Vec<usize>> {
    let n = w.n();
    if k < 2 {
        return Err(Error::InvalidParameter(format!(
            "normalized cuts needs k ≥ 2 clusters, got {k}"
        )));
    }
    if k > n {
        return Err(Error::InvalidParameter(format!(
            "cannot cut {n} nodes into {k} clusters"
        )));
    }
    let m = w.as_matrix();
    let mut inv_sqrt = vec![0.0f64; n];
    for (i, entry) in inv_sqrt.iter_mut().enumerate() {
        let degree: f64 = m.row(i).iter().sum();
        if degree > 0.0 {
            *entry = 1.0 / degree.sqrt();
        } else {
            log::warn!("affinity row {i} has zero degree; treating the node as isolated");
        }
    }
    let mut lap = Matrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let s = m[(i, j)] * inv_sqrt[i] * inv_sqrt[j];
            let value = if i == j { 1.0 - s } else { -s };
            lap[(i, j)] = value;
            lap[(j, i)] = value;
        }
    }
    let (_, vectors) = symmetric_eig(&lap)?;
    // Eigenvalues arrive in nonincreasing order; the k smallest live in the
    // last k columns.
    let cols: Vec<usize> = (n - k..n).collect();
    let mut embed = vectors.select_columns(&cols);
    for i in 0..n {
        let norm: f64 = embed.row(i).iter().map(|&x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        for j in 0..k {
            embed[(i, j)] /= norm;
        }
    }
    kmeans(&embed, k, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::accuracy;
    use crate::solver::{init_state, solve, SolverConfig};
    use crate::synth::{generate, SyntheticSpec};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn seeded(rows: usize, cols: usize, seed: u64) -> Matrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Matrix::from_fn(rows, cols, |_, _| rng.random_range(-1.0..1.0))
    }

    #[test]
    fn recover_z_is_identity_for_exact_full_rank_factorization() {
        let x = seeded(6, 6, 2);
        let s = init_state(&x, &SolverConfig::default()).unwrap();
        let z = recover_z(&x, &s.u, &s.v).unwrap();
        let eye = Matrix::identity(6);
        assert!((&z - &eye).max_abs() < 1e-8);
    }

    #[test]
    fn recover_z_checks_dimensions() {
        let x = seeded(5, 4, 3);
        assert!(recover_z(&x, &seeded(6, 2, 4), &seeded(2, 4, 5)).is_err());
        assert!(recover_z(&x, &seeded(5, 2, 4), &seeded(2, 3, 5)).is_err());
    }

    #[test]
    fn affinity_validation() {
        assert!(AffinityMatrix::new(seeded(3, 4, 6)).is_err()); // not square
        let mut neg = Matrix::zeros(2, 2);
        neg[(0, 1)] = -1.0;
        neg[(1, 0)] = -1.0;
        assert!(AffinityMatrix::new(neg).is_err());
        let mut asym = Matrix::zeros(2, 2);
        asym[(0, 1)] = 1.0;
        assert!(AffinityMatrix::new(asym).is_err());
        let mut nan = Matrix::zeros(2, 2);
        nan[(0, 0)] = f64::NAN;
        assert!(AffinityMatrix::new(nan).is_err());
        let ok = AffinityMatrix::new(Matrix::identity(3)).unwrap();
        assert_eq!(ok.n(), 3);
    }

    #[test]
    fn abs_affinity_oracle() {
        let z = Matrix::from_vec(2, 2, vec![1.0, -2.0, 3.0, 4.0]).unwrap();
        let w = build_affinity_abs(&z).unwrap();
        let m = w.as_matrix();
        assert_eq!(m[(0, 0)], 1.0);
        assert_eq!(m[(0, 1)], 2.5);
        assert_eq!(m[(1, 0)], 2.5);
        assert_eq!(m[(1, 1)], 4.0);
    }

    #[test]
    fn squared_affinity_rejects_degenerate_input() {
        assert!(build_affinity_squared(&Matrix::zeros(3, 3), 1e-8).is_err());
        let z = Matrix::identity(3);
        assert!(build_affinity_squared(&z, 0.0).is_err());
        assert!(build_affinity_squared(&z, 1.5).is_err());
        assert!(build_affinity_squared(&z, 1e-8).is_ok());
    }

    #[test]
    fn squared_affinity_separates_ideal_blocks() {
        // Z = blkdiag(ones(2,2), ones(2,2)): the normalized embedding rows of
        // each block coincide, so within-block affinity is 1 and cross-block
        // affinity vanishes.
        let mut z = Matrix::zeros(4, 4);
        for i in 0..2 {
            for j in 0..2 {
                z[(i, j)] = 1.0;
                z[(i + 2, j + 2)] = 1.0;
            }
        }
        let w = build_affinity_squared(&z, 1e-8).unwrap();
        let m = w.as_matrix();
        for i in 0..4 {
            for j in 0..4 {
                let same = (i < 2) == (j < 2);
                if same {
                    assert!((m[(i, j)] - 1.0).abs() < 1e-10, "({i},{j}) = {}", m[(i, j)]);
                } else {
                    assert!(m[(i, j)].abs() < 1e-10, "({i},{j}) = {}", m[(i, j)]);
                }
            }
        }
    }

    #[test]
    fn ncut_recovers_disconnected_blocks() {
        let sizes = [3usize, 4, 5];
        let n: usize = sizes.iter().sum();
        let mut w = Matrix::zeros(n, n);
        let mut truth = Vec::new();
        let mut offset = 0;
        for (c, &s) in sizes.iter().enumerate() {
            for i in 0..s {
                truth.push(c);
                for j in 0..s {
                    w[(offset + i, offset + j)] = 1.0;
                }
            }
            offset += s;
        }
        let labels = ncut_cluster(&AffinityMatrix::new(w).unwrap(), 3, 0).unwrap();
        assert_eq!(accuracy(&truth, &labels).unwrap(), 1.0);
    }

    #[test]
    fn ncut_survives_isolated_nodes() {
        let mut w = Matrix::zeros(5, 5);
        for i in 0..2 {
            for j in 0..2 {
                w[(i, j)] = 1.0;
                w[(i + 2, j + 2)] = 1.0;
            }
        }
        // node 4 has zero degree
        let labels = ncut_cluster(&AffinityMatrix::new(w).unwrap(), 3, 0).unwrap();
        assert_eq!(labels.len(), 5);
        assert!(labels.iter().all(|&l| l < 3));
    }

    #[test]
    fn ncut_rejects_bad_k() {
        let w = AffinityMatrix::new(Matrix::identity(4)).unwrap();
        assert!(ncut_cluster(&w, 1, 0).is_err());
        assert!(ncut_cluster(&w, 5, 0).is_err());
    }

    proptest::proptest! {
        /// Relabeling the points — conjugating W by a permutation — must permute
        /// the clustering the same way: the two partitions agree up to cluster
        /// renaming.
        #[test]
        fn ncut_is_permutation_equivariant(seed in 0u64..512) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let sizes = [3 + (seed % 3) as usize, 4, 5];
            let n: usize = sizes.iter().sum();
            let mut truth = Vec::with_capacity(n);
            for (c, &s) in sizes.iter().enumerate() {
                truth.extend(std::iter::repeat_n(c, s));
            }
            let mut w = Matrix::zeros(n, n);
            for i in 0..n {
                for j in 0..=i {
                    let base = if truth[i] == truth[j] { 0.8 } else { 0.0 };
                    let v = base + rng.random_range(0.0..0.05);
                    w[(i, j)] = v;
                    w[(j, i)] = v;
                }
            }
            let mut perm: Vec<usize> = (0..n).collect();
            for i in (1..n).rev() {
                perm.swap(i, rng.random_range(0..=i));
            }
            let wp = Matrix::from_fn(n, n, |i, j| w[(perm[i], perm[j])]);
            let labels = ncut_cluster(&AffinityMatrix::new(w).unwrap(), 3, 7).unwrap();
            let labels_p = ncut_cluster(&AffinityMatrix::new(wp).unwrap(), 3, 7).unwrap();
            // node i of the permuted graph is node perm[i] of the original
            let pulled: Vec<usize> = (0..n).map(|i| labels[perm[i]]).collect();
            proptest::prop_assert_eq!(accuracy(&pulled, &labels_p).unwrap(), 1.0);
        }
    }

    #[test]
    fn clean_instance_segments_perfectly_end_to_end() {
        let spec = SyntheticSpec {
            s: 3,
            p: 20,
            d_tilde: 60,
            r_tilde: 2,
            sigma: 0.0,
            seed: 13,
            ..Default::default()
        };
        let inst = generate(&spec).unwrap();
        let report = solve(&inst.x, &SolverConfig::default()).unwrap();
        assert!(report.converged);
        let z = recover_z(&inst.x, &report.final_state.u, &report.final_state.v).unwrap();
        let w = build_affinity_squared(&z, 1e-8).unwrap();
        let labels = ncut_cluster(&w, spec.s, 0).unwrap();
        assert_eq!(accuracy(&inst.labels, &labels).unwrap(), 1.0);
    }
}

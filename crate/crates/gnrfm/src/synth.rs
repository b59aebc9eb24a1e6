//! Synthetic union-of-subspaces data with column-wise contamination.
//!
//! An instance draws `s` subspaces of dimension `r_tilde` in ambient
//! dimension `d_tilde`: the first basis `B₁` is the leading `r̃` columns of
//! a random orthogonal `d̃×d̃` matrix, and each subsequent basis is the
//! previous one moved by a random rotation (a single rotation reused along
//! the chain by default). Every subspace contributes `p` points `B_i·P_i`
//! with standard normal coefficients `P_i`. Finally a fraction of the
//! columns, chosen without replacement, is contaminated in place:
//! `x_j += σ·‖x_j‖₂·η` with `η` a standard normal vector. The applied noise
//! is kept in `e0`, so the clean matrix is always `x − e0`.
//!
//! Everything is drawn from a single `ChaCha8Rng` stream seeded by `seed`,
//! in a fixed order, so instances are bit-reproducible across runs and
//! platforms.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Parameters of one synthetic instance, (s, p, d̃, r̃) plus noise controls.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SyntheticSpec {
    /// Number of subspaces.
    pub s: usize,
    /// Points per subspace.
    pub p: usize,
    /// Ambient dimension.
    pub d_tilde: usize,
    /// Dimension of each subspace.
    pub r_tilde: usize,
    /// Noise level relative to the clean column norm.
    pub sigma: f64,
    /// Fraction of columns contaminated (rounded half-up to a count).
    pub contamination: f64,
    pub seed: u64,
    /// Draw a fresh orthogonal transform for every step along the subspace
    /// chain instead of reusing one.
    pub fresh_rotation: bool,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        SyntheticSpec {
            s: 10,
            p: 20,
            d_tilde: 200,
            r_tilde: 5,
            sigma: 0.05,
            contamination: 0.2,
            seed: 0,
            fresh_rotation: false,
        }
    }
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if self.s == 0 || self.p == 0 || self.r_tilde == 0 || self.d_tilde == 0 {
            return bad("s, p, d_tilde, r_tilde must all be ≥ 1".into());
        }
        if self.r_tilde > self.d_tilde {
            return bad(format!(
                "subspace dimension {} exceeds ambient dimension {}",
                self.r_tilde, self.d_tilde
            ));
        }
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return bad(format!("sigma must be finite and ≥ 0, got {}", self.sigma));
        }
        if !(0.0..=1.0).contains(&self.contamination) {
            return bad(format!(
                "contamination must lie in [0,1], got {}",
                self.contamination
            ));
        }
        Ok(())
    }

    /// Number of columns, s·p.
    pub fn n_columns(&self) -> usize {
        self.s * self.p
    }
}

/// One generated instance: data `x` (d̃ × s·p), ground-truth `labels`
/// (labels[j] = j / p), the applied noise `e0` (so `x − e0` is clean), and
/// the subspace `bases` used.
#[derive(Debug, Clone)]
pub struct SyntheticInstance {
    pub x: Matrix,
    pub labels: Vec<usize>,
    pub e0: Matrix,
    pub bases: Vec<Matrix>,
}

/// Generate the instance described by `spec`.
pub fn generate(spec: &SyntheticSpec) -> Result<SyntheticInstance> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (d, r, n) = (spec.d_tilde, spec.r_tilde, spec.n_columns());

    // The leading r̃ columns of a random orthogonal d̃×d̃ matrix. Column j of
    // Gram–Schmidt depends only on drawn columns ≤ j, so stopping the draw
    // after r̃ columns yields those leading columns bit for bit without the
    // d̃³ cost of materializing the square matrix.
    let mut bases = Vec::with_capacity(spec.s);
    bases.push(random_orthonormal(d, r, &mut rng));
    let mut transform: Option<Matrix> = None;
    for _ in 1..spec.s {
        if spec.fresh_rotation || transform.is_none() {
            transform = Some(rotation_from(d, &mut rng));
        }
        let next = transform.as_ref().unwrap().dot(bases.last().unwrap());
        bases.push(next);
    }

    let mut x = Matrix::zeros(d, n);
    for (i, basis) in bases.iter().enumerate() {
        let coeffs = standard_normal_matrix(r, spec.p, &mut rng);
        let block = basis.dot(&coeffs);
        for row in 0..d {
            for col in 0..spec.p {
                x[(row, i * spec.p + col)] = block[(row, col)];
            }
        }
    }

    let n_corrupt = (spec.contamination * n as f64 + 0.5).floor() as usize;
    let mut chosen: Vec<usize> = (0..n).collect();
    for i in 0..n_corrupt {
        let j = rng.random_range(i..n);
        chosen.swap(i, j);
    }
    chosen.truncate(n_corrupt);
    chosen.sort_unstable();

    let mut e0 = Matrix::zeros(d, n);
    for &j in &chosen {
        let scale = spec.sigma * x.col_norm(j);
        for i in 0..d {
            let eta: f64 = rng.sample(StandardNormal);
            let noise = scale * eta;
            e0[(i, j)] = noise;
            x[(i, j)] += noise;
        }
    }

    let labels = (0..n).map(|j| j / spec.p).collect();
    Ok(SyntheticInstance {
        x,
        labels,
        e0,
        bases,
    })
}

/// A seeded random d×d rotation: orthogonal with determinant exactly +1
/// (well, +1 up to rounding — asserted to 1e-10 in tests). Built as the
/// orthonormalization of a Gaussian draw (whose normalization signs make it
/// Haar-distributed over the orthogonal group) with the last column flipped
/// whenever the determinant comes out −1.
pub fn random_rotation(d: usize, seed: u64) -> Matrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rotation_from(d, &mut rng)
}

fn rotation_from(d: usize, rng: &mut ChaCha8Rng) -> Matrix {
    let mut q = random_orthonormal(d, d, rng);
    if det_sign(&q) < 0.0 {
        for i in 0..d {
            q[(i, d - 1)] = -q[(i, d - 1)];
        }
    }
    q
}

/// Sign of the determinant via LU with partial pivoting (the input here is
/// always orthogonal, so pivots stay well away from zero).
fn det_sign(m: &Matrix) -> f64 {
    let d = m.rows();
    assert_eq!(d, m.cols(), "determinant of a non-square matrix");
    let mut a = m.clone();
    let mut sign = 1.0;
    for col in 0..d {
        let mut pivot = col;
        for row in col + 1..d {
            if a[(row, col)].abs() > a[(pivot, col)].abs() {
                pivot = row;
            }
        }
        if a[(pivot, col)] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            for j in 0..d {
                let tmp = a[(col, j)];
                a[(col, j)] = a[(pivot, j)];
                a[(pivot, j)] = tmp;
            }
            sign = -sign;
        }
        if a[(col, col)] < 0.0 {
            sign = -sign;
        }
        for row in col + 1..d {
            let factor = a[(row, col)] / a[(col, col)];
            for j in col..d {
                a[(row, j)] -= factor * a[(col, j)];
            }
        }
    }
    sign
}

/// Random d×k matrix with orthonormal columns: standard normal entries
/// drawn column by column, then two passes of modified Gram–Schmidt (the
/// second pass cleans up the rounding the first leaves behind). Column j
/// only ever touches columns ≤ j, so this equals the leading k columns of
/// the same construction at any larger width.
fn random_orthonormal(d: usize, k: usize, rng: &mut ChaCha8Rng) -> Matrix {
    assert!(
        k <= d,
        "cannot build {k} orthonormal columns in dimension {d}"
    );
    let mut m = standard_normal_matrix(d, k, rng);
    for _pass in 0..2 {
        for j in 0..k {
            for prev in 0..j {
                let mut dot = 0.0;
                for i in 0..d {
                    dot += m[(i, prev)] * m[(i, j)];
                }
                for i in 0..d {
                    m[(i, j)] -= dot * m[(i, prev)];
                }
            }
            let norm = m.col_norm(j);
            // A Gaussian column is dependent on its predecessors with
            // probability zero; treat exact collapse as unreachable.
            assert!(
                norm > 0.0,
                "degenerate Gaussian draw during orthonormalization"
            );
            for i in 0..d {
                m[(i, j)] /= norm;
            }
        }
    }
    m
}

/// Column-major fill so a rows×k draw is a prefix of the rows×k' draw for
/// any k' > k from the same stream position.
fn standard_normal_matrix(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> Matrix {
    let mut m = Matrix::zeros(rows, cols);
    for j in 0..cols {
        for i in 0..rows {
            m[(i, j)] = rng.sample(StandardNormal);
        }
    }
    m
}

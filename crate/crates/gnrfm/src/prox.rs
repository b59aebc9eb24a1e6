//! The ℓ2,1 group norm and its proximal operator.
//!
//! ‖M‖_{2,1} = Σ_j ‖M_{*j}‖₂ sums the Euclidean norms of the columns; its
//! proximal map shrinks every column norm by τ and zeroes columns whose norm
//! is at or below τ. Both the error term E and the factor U are regularized
//! this way, which is where column sparsity — and hence automatic rank
//! reduction — comes from.

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Sum of the Euclidean norms of the columns of `m`.
pub fn group_norm_21(m: &Matrix) -> f64 {
    (0..m.cols()).map(|j| m.col_norm(j)).sum()
}

/// Column-wise soft threshold: column j of the result is
/// `max(‖M_{*j}‖ − τ, 0) · M_{*j} / ‖M_{*j}‖`.
///
/// Columns with norm ≤ τ come out *exactly* zero — the solver's pruning step
/// relies on the zeros being exact, not merely small. A zero input column maps
/// to a zero output column (no 0/0). With τ = 0 the input is returned
/// bit-identically (the scale `(n − 0)/n` evaluates to exactly 1).
// `!(tau >= 0.0)` rather than `tau < 0.0`: the negated form also rejects NaN.
#[allow(clippy::neg_cmp_op_on_partial_ord)]
pub fn column_soft_threshold(m: &Matrix, tau: f64) -> Result<Matrix> {
    if !(tau >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "soft-threshold level must be ≥ 0, got {tau}"
        )));
    }
    let mut out = Matrix::zeros(m.rows(), m.cols());
    for j in 0..m.cols() {
        let norm = m.col_norm(j);
        if norm <= tau || norm == 0.0 {
            continue; // column stays exactly zero
        }
        let scale = (norm - tau) / norm;
        for i in 0..m.rows() {
            out[(i, j)] = m[(i, j)] * scale;
        }
    }
    Ok(out)
}

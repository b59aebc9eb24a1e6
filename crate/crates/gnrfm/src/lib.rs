//! Group-norm regularized factorization (GNRFM) for low-rank representation,
//! with an accelerated augmented-Lagrangian solver and the full subspace
//! segmentation pipeline built on top of it.
//!
//! The model factors a data matrix `X ∈ R^{m×n}` as `X = U·V + E`, minimizing
//!
//! ```text
//! ‖E‖₂,₁ + μ_U·‖U‖₂,₁ + (μ_V/2)·‖V‖²_F      s.t.  X = UV + E
//! ```
//!
//! The ℓ2,1 penalty on U zeroes whole columns, so the factor width shrinks
//! from an overestimate K toward the true rank while the solver runs; the
//! ℓ2,1 penalty on E absorbs column-wise (sample-wise) corruption. The crate
//! is organized bottom-up:
//!
//! * [`matrix`], [`linalg`], [`prox`] — dense kernels: fixed-order matrix
//!   products, Jacobi SVD/eigendecomposition, Cholesky solves, the group
//!   soft-threshold operator.
//! * [`solver`] — the augmented-Lagrangian iteration (one-step, fixed, or
//!   run-to-convergence inner loops; optional zero-column pruning).
//! * [`segmentation`], [`kmeans`] — low-rank representation recovery,
//!   affinity construction, normalized-cuts spectral clustering.
//! * [`synth`] — the union-of-subspaces benchmark generator with ground-truth
//!   labels and the injected noise matrix.
//! * [`metrics`] — permutation-invariant accuracy (Hungarian matching) and
//!   normalized mutual information.
//!
//! Everything is deterministic: identical inputs (including seeds) produce
//! bit-identical outputs on any platform.

pub mod error;
pub mod kmeans;
pub mod linalg;
pub mod matrix;
pub mod metrics;
pub mod prox;
pub mod segmentation;
pub mod solver;
pub mod synth;

pub use error::{Error, Result};
pub use linalg::SvdResult;
pub use matrix::Matrix;
pub use solver::{FactorState, InnerMode, SolveReport, SolverConfig};
pub use synth::{SyntheticInstance, SyntheticSpec};

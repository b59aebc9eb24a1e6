//! Dense factorization kernels: SVD, symmetric eigendecomposition, SPD
//! solves, and a power-iteration spectral norm.
//!
//! All four are classical textbook algorithms implemented directly so that
//! results are deterministic across platforms and independent of any BLAS
//! threading or blocking choices (see the note in [`crate::matrix`]).

mod eig;
mod power;
mod spd;
mod svd;

pub use eig::symmetric_eig;
pub use power::spectral_norm_sq;
pub use spd::solve_spd;
pub use svd::{pseudoinverse, svd, SvdResult};

//! Dense complex vector/matrix arithmetic used by the stability and
//! learning-curve machinery: Kronecker products, vectorization, weighted
//! norms, Hermitian and general eigensolvers, and LU-based linear solves.
//!
//! Matrices are stored row-major with explicit shape fields; there is no
//! implicit broadcasting. Sizes stay small (a few hundred rows at most), so
//! the solvers favor robustness over asymptotic speed.

mod eig;
mod matrix;
mod solve;

pub use eig::{eig_general, eig_hermitian, EigenOptions, EigenResult};
pub use matrix::{kron, unvectorize, vectorize, weighted_norm_sq, CMatrix, CVector};
pub use solve::{solve, solve_matrix, LuFactors};

use thiserror::Error;

/// Errors raised by the linear-algebra layer.
#[derive(Debug, Error)]
pub enum AlgebraError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is singular or ill-conditioned (condition estimate {cond:.3e} exceeds cap {cap:.3e})")]
    IllConditioned { cond: f64, cap: f64 },
    #[error("eigensolver did not converge within {sweeps} sweeps (off-diagonal mass {offdiag:.3e})")]
    NoConvergence { sweeps: usize, offdiag: f64 },
    #[error("weighting matrix is not Hermitian: quadratic form has imaginary part {0:.3e}")]
    NonHermitianWeight(f64),
    #[error("{0}")]
    InvalidArgument(String),
}

pub type AlgebraResult<T> = Result<T, AlgebraError>;

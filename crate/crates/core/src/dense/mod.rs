//! Dense real linear algebra: matrices, LU with partial pivoting, and a
//! Hessenberg/Francis-QR eigenvalue solver.

mod eigen;
mod lu;
mod matrix;

pub use eigen::{
    eigenvalues, hessenberg, mat_poly_eval, poly_roots, spectral_condition, DEFLATION_RTOL,
    MAX_EIGEN_DIM,
};
pub use lu::{lu_factor, lu_solve, LuFactors, SINGULAR_PIVOT_RTOL};
pub use matrix::DenseMatrix;

/// Eigenvalue / polynomial root type.
pub type ComplexScalar = num_complex::Complex64;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DenseError {
    #[error("dimension mismatch in {op}: {left:?} vs {right:?}")]
    DimensionMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("matrix is singular to working precision (pivot column {column})")]
    Singular { column: usize },
    #[error("QR iteration did not converge after {sweeps} sweeps without deflation")]
    NoConvergence { sweeps: usize },
    #[error("matrix dimension {dim} exceeds the dense limit {max}")]
    TooLarge { dim: usize, max: usize },
    #[error("leading polynomial coefficient is zero")]
    ZeroLeadingCoefficient,
    #[error("spectrum contains a zero eigenvalue")]
    ZeroEigenvalue,
}

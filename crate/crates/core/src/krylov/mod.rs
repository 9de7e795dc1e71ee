//! Full GMRES with left preconditioning and iteration-count tables.

mod gmres;
mod table;

pub use gmres::{gmres, SolveStats, BREAKDOWN_RTOL, DEFAULT_TOL};
pub use table::{iteration_count_matrix, CountTable, TableRow};

use crate::dense::DenseMatrix;
use crate::schur::PrecondError;
use crate::sparse::CsrMatrix;

#[derive(Debug, thiserror::Error)]
pub enum KrylovError {
    #[error("tolerance must be positive, got {0}")]
    InvalidTolerance(f64),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("Arnoldi breakdown at step {iteration} with a singular Hessenberg matrix")]
    Breakdown { iteration: usize },
    #[error(transparent)]
    Precond(#[from] PrecondError),
}

/// Square matrix-vector product `y = A x`.
pub trait LinearOperator: Send + Sync {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64], y: &mut [f64]);
    fn describe(&self) -> String {
        format!("operator of dimension {}", self.dim())
    }
}

impl LinearOperator for DenseMatrix {
    fn dim(&self) -> usize {
        self.rows()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = self.row(i).iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }

    fn describe(&self) -> String {
        format!("dense {}x{}", self.rows(), self.cols())
    }
}

impl LinearOperator for CsrMatrix {
    fn dim(&self) -> usize {
        self.rows()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.spmv_into(x, y);
    }

    fn describe(&self) -> String {
        format!("sparse {}x{} with {} nonzeros", self.rows(), self.cols(), self.nnz())
    }
}

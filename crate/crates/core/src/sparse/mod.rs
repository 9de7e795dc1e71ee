//! Compressed sparse row storage, threshold incomplete Cholesky and Matrix
//! Market I/O.

mod csr;
mod ichol;
mod mm;

pub use csr::{spmv, CsrMatrix};
pub use ichol::{
    ic_solve, ic_solve_in_place, ichol, IcFactor, INITIAL_SHIFT, MAX_SHIFT_RESTARTS, SYMMETRY_RTOL,
};
pub use mm::{parse_matrix_market, read_matrix_market, write_matrix_market, write_matrix_market_string};

#[derive(Debug, thiserror::Error)]
pub enum SparseError {
    #[error("entry ({row}, {col}) outside a {rows}x{cols} matrix")]
    IndexOutOfRange {
        row: usize,
        col: usize,
        rows: usize,
        cols: usize,
    },
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid CSR structure: {0}")]
    Structure(String),
    #[error("matrix is not symmetric (relative asymmetry {asymmetry:e})")]
    NotSymmetric { asymmetry: f64 },
    #[error("diagonal entry {row} is not positive")]
    NonPositiveDiagonal { row: usize },
    #[error("drop tolerance must be finite and nonnegative, got {0}")]
    InvalidTolerance(f64),
    #[error("incomplete Cholesky broke down after {restarts} diagonal shifts")]
    BreakdownUnrecoverable { restarts: usize },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

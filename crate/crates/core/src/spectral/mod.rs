//! Predicted minimal polynomials, annihilation residuals, spectrum
//! membership, positive stability and Routh tables.

mod poly;
mod routh;
mod verify;

pub use poly::{pbar_polynomials, predicted_polynomial, ptilde_polynomials, Polynomial};
pub use routh::{coefficient_law_check, routh_table, CoefficientLaw, RouthTable};
pub use verify::{
    annihilation_residual, membership_tolerance, min_real_part, positive_stable, predicted_roots,
    spectral_report, spectrum_membership, verify_case, write_verify_csv, Membership,
    SpectralReport, VerifyCase, VerifyRow, ANNIHILATION_TOL, CSV_HEADER, MEMBERSHIP_TOL,
    PRINTED_ROOT_TOL,
};

use crate::block::BlockError;
use crate::dense::DenseError;
use crate::schur::PrecondError;

#[derive(Debug, thiserror::Error)]
pub enum SpectralError {
    #[error("the zero polynomial has no degree")]
    ZeroPolynomial,
    #[error("polynomial degree too low for this operation")]
    DegreeTooLow,
    #[error("zero entry in the first column of Routh row {row}")]
    ZeroFirstColumnEntry { row: usize },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("no admissible system found after {retries} retries")]
    GenerationFailed { retries: usize },
    #[error(transparent)]
    Dense(#[from] DenseError),
    #[error(transparent)]
    Precond(#[from] PrecondError),
    #[error(transparent)]
    Block(#[from] BlockError),
}

//! Nested and additive Schur complements and the block preconditioner
//! families built from them.

mod chain;
mod precond;
mod preset;

pub use chain::{additive_schur, block_ldu, nested_chain, AdditiveSchur, BlockLdu, SchurChain};
pub use precond::{
    make_additive, make_nested, make_with_solvers, preconditioned_matrix, BlockOperator,
    BlockSolver, Coupling, FnSolver, Negated, Preconditioner,
};
pub use preset::{Family, PreconditionerSpec, Preset};

use crate::block::BlockError;
use crate::dense::DenseError;
use crate::sparse::SparseError;

#[derive(Debug, thiserror::Error)]
pub enum PrecondError {
    #[error("Schur complement S_{block} is singular")]
    SingularSchur { block: usize },
    #[error("leading block {block} is singular")]
    SingularLeadingBlock { block: usize },
    #[error("no solver supplied for diagonal block {block}")]
    MissingSolver { block: usize },
    #[error("expected {expected} signs, found {found}")]
    SignLength { expected: usize, found: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid coupling from block {col} into block {row}: {reason}")]
    InvalidCoupling {
        row: usize,
        col: usize,
        reason: &'static str,
    },
    #[error("preset {preset} does not apply: {reason}")]
    WrongFamily { preset: String, reason: String },
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
    #[error("dense size {dim} exceeds the limit {max}")]
    TooLarge { dim: usize, max: usize },
    #[error(transparent)]
    Dense(#[from] DenseError),
    #[error(transparent)]
    Sparse(#[from] SparseError),
    #[error(transparent)]
    Block(#[from] BlockError),
}

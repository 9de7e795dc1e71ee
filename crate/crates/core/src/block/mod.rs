//! Block tridiagonal and arrowhead saddle point systems: assembly,
//! permutation, seeded generation and Matrix Market manifests.

mod io;
mod random;
mod system;

pub use io::{
    mm_export, mm_import, read_manifest, write_manifest, Manifest, ManifestEntry, MANIFEST_FILE,
};
pub use random::{random_system, SystemOptions, MAX_GENERATION_RETRIES};
pub use system::{
    assemble, assemble_arrowhead, permute_dense, permute_threeblock, ArrowheadSystem,
    BlockTridiagonalSystem,
};

use crate::dense::DenseError;
use crate::sparse::SparseError;

#[derive(Debug, thiserror::Error)]
pub enum BlockError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("expected {expected} blocks, found {found}")]
    WrongBlockCount { expected: usize, found: usize },
    #[error("invalid options: {0}")]
    InvalidOptions(String),
    #[error("no nonsingular system found after {retries} retries")]
    GenerationFailed { retries: usize },
    #[error("manifest line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Dense(#[from] DenseError),
    #[error(transparent)]
    Sparse(#[from] SparseError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

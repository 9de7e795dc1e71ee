//! Three-field Biot discretization on the unit square and its block
//! preconditioners.

mod assembly;
mod bench;
mod mesh;
mod precond;

pub use assembly::{assemble_biot, assemble_full, BiotAssembly, FullBlocks};
pub use bench::{
    acceptance_trends, biot_table, ordering_invariants, TrendCheck, BIOT_COLUMNS, DEFAULT_MAXIT,
};
pub use mesh::{build_mesh, TriangularMesh};
pub use precond::{
    build_biot_preconditioners, export_biot, fourier_schur_approx, instantiate_presets,
    schur_p_shift, schur_xi_scale, BiotPreconditioners,
};

use crate::block::BlockError;
use crate::schur::PrecondError;
use crate::sparse::SparseError;

#[derive(Debug, thiserror::Error)]
pub enum BiotError {
    #[error("parameter {name} = {value} is out of range")]
    ParameterOutOfRange { name: &'static str, value: f64 },
    #[error("mesh needs at least one cell per side, got {0}")]
    InvalidMesh(usize),
    #[error("drop tolerance must be positive, got {0}")]
    InvalidDropTolerance(f64),
    #[error(transparent)]
    Sparse(#[from] SparseError),
    #[error(transparent)]
    Precond(#[from] PrecondError),
    #[error(transparent)]
    Block(#[from] BlockError),
}

/// Physical data. Defaults: `ν = 0.499`, every other scalar 1, `f = (1, 1)`,
/// `g = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct BiotParameters {
    /// Young's modulus.
    pub e: f64,
    /// Poisson ratio.
    pub nu: f64,
    pub alpha: f64,
    pub c0: f64,
    /// Permeability.
    pub k: f64,
    pub dt: f64,
    pub rho_f: f64,
    pub g: [f64; 2],
    pub f: [f64; 2],
    pub q_s: f64,
}

impl Default for BiotParameters {
    fn default() -> Self {
        Self {
            e: 1.0,
            nu: 0.499,
            alpha: 1.0,
            c0: 1.0,
            k: 1.0,
            dt: 1.0,
            rho_f: 1.0,
            g: [0.0, 0.0],
            f: [1.0, 1.0],
            q_s: 1.0,
        }
    }
}

impl BiotParameters {
    pub fn lambda(&self) -> f64 {
        self.e * self.nu / ((1.0 + self.nu) * (1.0 - 2.0 * self.nu))
    }

    pub fn mu(&self) -> f64 {
        self.e / (2.0 * (1.0 + self.nu))
    }

    pub fn validate(&self) -> Result<(), BiotError> {
        let bad = |name, value| Err(BiotError::ParameterOutOfRange { name, value });
        // λ must be positive for the ξ mass scaling
        if !(self.nu > 0.0 && self.nu < 0.5) {
            return bad("nu", self.nu);
        }
        if !(self.e > 0.0) {
            return bad("E", self.e);
        }
        if !(self.dt > 0.0) {
            return bad("dt", self.dt);
        }
        if !(self.k >= 0.0) {
            return bad("K", self.k);
        }
        if !(self.c0 >= 0.0) {
            return bad("c0", self.c0);
        }
        let all = [self.alpha, self.rho_f, self.g[0], self.g[1], self.f[0], self.f[1], self.q_s];
        if let Some(v) = all.iter().find(|v| !v.is_finite()) {
            return bad("load", *v);
        }
        Ok(())
    }
}

//! Nested and additive Schur-complement preconditioners for twofold and
//! block-tridiagonal saddle point systems.

pub mod dense;
pub mod sparse;
pub mod block;
pub mod schur;
pub mod spectral;
pub mod krylov;
pub mod biot;

use std::path::{Path, PathBuf};
use std::sync::Arc;

use super::{BiotAssembly, BiotError, BiotParameters, BIOT_COLUMNS};
use crate::block::write_manifest;
use crate::schur::{make_with_solvers, BlockOperator, BlockSolver, Negated, Preconditioner, Preset};
use crate::sparse::{ichol, write_matrix_market, CsrMatrix, IcFactor};

/// `1/λ + 1/(2μ)`, the symbol of `S_ξ`.
pub fn schur_xi_scale(p: &BiotParameters) -> f64 {
    1.0 / p.lambda() + 1.0 / (2.0 * p.mu())
}

/// `2μα² / (λ(λ + 2μ))`, the mass shift turning `A_p` into the `S_p` model.
pub fn schur_p_shift(p: &BiotParameters) -> f64 {
    let (l, m) = (p.lambda(), p.mu());
    2.0 * m * p.alpha * p.alpha / (l * (l + 2.0 * m))
}

/// Mass-matrix models of the two Schur complements:
/// `S_ξ ≈ (1/λ + 1/(2μ)) M_ξ`, `S_p ≈ A_p + 2μα²/(λ(λ+2μ)) M_p`.
pub fn fourier_schur_approx(
    asm: &BiotAssembly,
    p: &BiotParameters,
) -> Result<(CsrMatrix, CsrMatrix), BiotError> {
    let s_xi = asm.m_xi.scale(schur_xi_scale(p));
    let s_p = asm.a_p.linear_combination(1.0, &asm.m_p, schur_p_shift(p))?;
    Ok((s_xi, s_p))
}

/// The eight table preconditioners over one shared set of block solvers.
pub fn instantiate_presets(
    asm: &BiotAssembly,
    s_u: Arc<dyn BlockSolver>,
    s_xi: Arc<dyn BlockSolver>,
    s_p: Arc<dyn BlockSolver>,
) -> Result<Vec<(Preset, Preconditioner)>, BiotError> {
    let c1: Arc<dyn BlockOperator> = Arc::new(asm.b_uxi.clone());
    let c2: Arc<dyn BlockOperator> = Arc::new(asm.b_xip.clone());
    BIOT_COLUMNS
        .iter()
        .map(|&preset| {
            let p = make_with_solvers(
                &preset.spec(),
                vec![Some(s_u.clone()), Some(s_xi.clone()), Some(s_p.clone())],
                vec![c1.clone(), c2.clone()],
            )?;
            Ok((preset, p))
        })
        .collect()
}

pub struct BiotPreconditioners {
    /// IC factors of `A_u`, the `S_ξ` model and minus the `S_p` model.
    pub a_u: Arc<IcFactor>,
    pub s_xi: Arc<IcFactor>,
    pub neg_s_p: Arc<IcFactor>,
    /// In table column order.
    pub presets: Vec<(Preset, Preconditioner)>,
}

impl BiotPreconditioners {
    pub fn get(&self, preset: Preset) -> Option<&Preconditioner> {
        self.presets.iter().find(|(p, _)| *p == preset).map(|(_, m)| m)
    }
}

/// IC(τ) of `A_u`, `S_ξ` and `-S_p` (the latter is negative definite), then
/// every table preset built from them. `τ = 0` keeps all fill.
pub fn build_biot_preconditioners(
    asm: &BiotAssembly,
    params: &BiotParameters,
    tau: f64,
) -> Result<BiotPreconditioners, BiotError> {
    if !(tau >= 0.0 && tau.is_finite()) {
        return Err(BiotError::InvalidDropTolerance(tau));
    }
    let (s_xi, s_p) = fourier_schur_approx(asm, params)?;
    let a_u = Arc::new(ichol(&asm.a_u, tau)?);
    let s_xi = Arc::new(ichol(&s_xi, tau)?);
    let neg_s_p = Arc::new(ichol(&s_p.scale(-1.0), tau)?);
    let presets = instantiate_presets(
        asm,
        a_u.clone(),
        s_xi.clone(),
        Arc::new(Negated(neg_s_p.clone())),
    )?;
    Ok(BiotPreconditioners {
        a_u,
        s_xi,
        neg_s_p,
        presets,
    })
}

/// Writes `A_u`, `A_ξ`, `A_p`, `B_uξᵀ`, `B_ξpᵀ` with a manifest (the lower
/// blocks default to the transposes), plus `M_xi.mtx` and `M_p.mtx`.
pub fn export_biot(asm: &BiotAssembly, dir: &Path) -> Result<PathBuf, BiotError> {
    let (b1, b2) = (asm.b_uxi.transpose(), asm.b_xip.transpose());
    let blocks = [
        ('A', 1, &asm.a_u),
        ('A', 2, &asm.a_xi),
        ('A', 3, &asm.a_p),
        ('B', 1, &b1),
        ('B', 2, &b2),
    ];
    let manifest = write_manifest(dir, 3, &asm.block_sizes(), &blocks)?;
    write_matrix_market(&asm.m_xi, &dir.join("M_xi.mtx"))?;
    write_matrix_market(&asm.m_p, &dir.join("M_p.mtx"))?;
    Ok(manifest)
}

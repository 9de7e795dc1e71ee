use std::sync::Arc;

use super::{AdditiveSchur, Family, PrecondError, PreconditionerSpec, SchurChain};
use crate::block::{ArrowheadSystem, BlockTridiagonalSystem};
use crate::dense::{DenseMatrix, LuFactors, MAX_EIGEN_DIM};
use crate::sparse::{ic_solve, CsrMatrix, IcFactor};

/// Approximate or exact action of a diagonal block inverse.
pub trait BlockSolver: Send + Sync {
    fn dim(&self) -> usize;
    fn solve(&self, b: &[f64]) -> Result<Vec<f64>, PrecondError>;
}

impl BlockSolver for LuFactors {
    fn dim(&self) -> usize {
        LuFactors::dim(self)
    }

    fn solve(&self, b: &[f64]) -> Result<Vec<f64>, PrecondError> {
        Ok(self.solve_vec(b)?)
    }
}

impl BlockSolver for IcFactor {
    fn dim(&self) -> usize {
        IcFactor::dim(self)
    }

    fn solve(&self, b: &[f64]) -> Result<Vec<f64>, PrecondError> {
        Ok(ic_solve(self, b)?)
    }
}

impl<S: BlockSolver + ?Sized> BlockSolver for Arc<S> {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn solve(&self, b: &[f64]) -> Result<Vec<f64>, PrecondError> {
        (**self).solve(b)
    }
}

/// Solves with `-M` given a solver for `M`.
pub struct Negated<S>(pub S);

impl<S: BlockSolver> BlockSolver for Negated<S> {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn solve(&self, b: &[f64]) -> Result<Vec<f64>, PrecondError> {
        let mut x = self.0.solve(b)?;
        x.iter_mut().for_each(|v| *v = -*v);
        Ok(x)
    }
}

/// Wraps a closure as a block solver.
pub struct FnSolver<F> {
    dim: usize,
    f: F,
}

impl<F> FnSolver<F>
where
    F: Fn(&[f64]) -> Vec<f64> + Send + Sync,
{
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f }
    }
}

impl<F> BlockSolver for FnSolver<F>
where
    F: Fn(&[f64]) -> Vec<f64> + Send + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn solve(&self, b: &[f64]) -> Result<Vec<f64>, PrecondError> {
        if b.len() != self.dim {
            return Err(PrecondError::DimensionMismatch {
                expected: self.dim,
                found: b.len(),
            });
        }
        Ok((self.f)(b))
    }
}

/// Off-diagonal coupling block.
pub trait BlockOperator: Send + Sync {
    fn shape(&self) -> (usize, usize);
    /// `y -= scale * Op * x`.
    fn apply_sub(&self, x: &[f64], y: &mut [f64], scale: f64);
}

impl BlockOperator for DenseMatrix {
    fn shape(&self) -> (usize, usize) {
        DenseMatrix::shape(self)
    }

    fn apply_sub(&self, x: &[f64], y: &mut [f64], scale: f64) {
        for (i, yi) in y.iter_mut().enumerate() {
            let dot: f64 = self.row(i).iter().zip(x).map(|(a, b)| a * b).sum();
            *yi -= scale * dot;
        }
    }
}

impl BlockOperator for CsrMatrix {
    fn shape(&self) -> (usize, usize) {
        (self.rows(), self.cols())
    }

    fn apply_sub(&self, x: &[f64], y: &mut [f64], scale: f64) {
        for (i, yi) in y.iter_mut().enumerate() {
            let (idx, vals) = self.row(i);
            let dot: f64 = idx.iter().zip(vals).map(|(&j, v)| v * x[j]).sum();
            *yi -= scale * dot;
        }
    }
}

#[derive(Clone)]
pub struct Coupling {
    pub row: usize,
    pub col: usize,
    pub sign: f64,
    pub op: Arc<dyn BlockOperator>,
}

/// Block lower-triangular (or diagonal) preconditioner applied by block
/// forward substitution:
/// `x_i = δ_i M_i⁻¹ (v_i − Σ γ_k Op_k x_{col_k})`.
#[derive(Clone)]
pub struct Preconditioner {
    offsets: Vec<usize>,
    solvers: Vec<Arc<dyn BlockSolver>>,
    signs: Vec<f64>,
    couplings: Vec<Coupling>,
}

impl Preconditioner {
    pub fn new(
        solvers: Vec<Arc<dyn BlockSolver>>,
        signs: Vec<f64>,
        mut couplings: Vec<Coupling>,
    ) -> Result<Self, PrecondError> {
        if signs.len() != solvers.len() {
            return Err(PrecondError::SignLength {
                expected: solvers.len(),
                found: signs.len(),
            });
        }
        let mut offsets = vec![0];
        for s in &solvers {
            offsets.push(offsets.last().unwrap() + s.dim());
        }
        for c in &couplings {
            if c.col >= c.row || c.row >= solvers.len() {
                return Err(PrecondError::InvalidCoupling {
                    row: c.row,
                    col: c.col,
                    reason: "couplings must lie strictly below the block diagonal",
                });
            }
            if c.op.shape() != (solvers[c.row].dim(), solvers[c.col].dim()) {
                return Err(PrecondError::InvalidCoupling {
                    row: c.row,
                    col: c.col,
                    reason: "operator shape does not match the block sizes",
                });
            }
        }
        couplings.sort_by_key(|c| (c.row, c.col));
        Ok(Self {
            offsets,
            solvers,
            signs,
            couplings,
        })
    }

    /// Single-block preconditioner, e.g. a full LU of the system.
    pub fn single(solver: Arc<dyn BlockSolver>) -> Self {
        Self::new(vec![solver], vec![1.0], vec![]).expect("one block is always valid")
    }

    pub fn dim(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    pub fn block_count(&self) -> usize {
        self.solvers.len()
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        self.offsets.windows(2).map(|w| w[1] - w[0]).collect()
    }

    pub fn apply(&self, v: &[f64]) -> Result<Vec<f64>, PrecondError> {
        if v.len() != self.dim() {
            return Err(PrecondError::DimensionMismatch {
                expected: self.dim(),
                found: v.len(),
            });
        }
        let mut x = vec![0.0; v.len()];
        let mut k = 0;
        for i in 0..self.solvers.len() {
            let (s, e) = (self.offsets[i], self.offsets[i + 1]);
            let mut r = v[s..e].to_vec();
            while k < self.couplings.len() && self.couplings[k].row == i {
                let c = &self.couplings[k];
                let (cs, ce) = (self.offsets[c.col], self.offsets[c.col + 1]);
                c.op.apply_sub(&x[cs..ce], &mut r, c.sign);
                k += 1;
            }
            let xi = self.solvers[i].solve(&r)?;
            if xi.len() != e - s {
                return Err(PrecondError::DimensionMismatch {
                    expected: e - s,
                    found: xi.len(),
                });
            }
            let sign = self.signs[i];
            for (dst, src) in x[s..e].iter_mut().zip(xi) {
                *dst = sign * src;
            }
        }
        Ok(x)
    }
}

fn check_signs(spec: &PreconditionerSpec, blocks: usize) -> Result<(), PrecondError> {
    if spec.diag_signs.len() != blocks {
        return Err(PrecondError::SignLength {
            expected: blocks,
            found: spec.diag_signs.len(),
        });
    }
    let want = if spec.family.is_triangular() {
        blocks - 1
    } else {
        0
    };
    if spec.subdiag_signs.len() != want {
        return Err(PrecondError::SignLength {
            expected: want,
            found: spec.subdiag_signs.len(),
        });
    }
    Ok(())
}

/// Builds a preconditioner from caller-provided diagonal solvers and lower
/// coupling operators.
///
/// `couplings[k]` is `C_{k+1}` for nested families and the corner row's
/// `k`-th border block for additive ones. Diagonal families ignore them.
pub fn make_with_solvers(
    spec: &PreconditionerSpec,
    solvers: Vec<Option<Arc<dyn BlockSolver>>>,
    couplings: Vec<Arc<dyn BlockOperator>>,
) -> Result<Preconditioner, PrecondError> {
    let n = spec.block_count();
    check_signs(spec, n)?;
    if solvers.len() != n {
        return Err(PrecondError::MissingSolver {
            block: solvers.len().min(n) + 1,
        });
    }
    let solvers = solvers
        .into_iter()
        .enumerate()
        .map(|(i, s)| s.ok_or(PrecondError::MissingSolver { block: i + 1 }))
        .collect::<Result<Vec<_>, _>>()?;
    let mut links = Vec::new();
    if spec.family.is_triangular() {
        if couplings.len() != n - 1 {
            return Err(PrecondError::InvalidCoupling {
                row: n - 1,
                col: couplings.len(),
                reason: "triangular families need one coupling per off-diagonal block",
            });
        }
        for (k, op) in couplings.into_iter().enumerate() {
            let (row, col) = match spec.family {
                Family::NestedTriangular => (k + 1, k),
                _ => (n - 1, k),
            };
            links.push(Coupling {
                row,
                col,
                sign: spec.subdiag_signs[k],
                op,
            });
        }
    }
    Preconditioner::new(solvers, spec.diag_signs.clone(), links)
}

/// Exact nested preconditioner from a Schur chain.
pub fn make_nested(
    spec: &PreconditionerSpec,
    sys: &BlockTridiagonalSystem,
    chain: &SchurChain,
) -> Result<Preconditioner, PrecondError> {
    if spec.family.is_additive() {
        return Err(PrecondError::WrongFamily {
            preset: format!("{:?}", spec.family),
            reason: "additive families need an arrowhead system".into(),
        });
    }
    check_signs(spec, sys.n())?;
    let solvers = (0..sys.n())
        .map(|i| Some(Arc::new(chain.factor(i).clone()) as Arc<dyn BlockSolver>))
        .collect();
    let couplings = (0..sys.n() - 1)
        .map(|i| Arc::new(sys.lower(i).clone()) as Arc<dyn BlockOperator>)
        .collect();
    make_with_solvers(spec, solvers, couplings)
}

/// Exact additive preconditioner: signed leading blocks, then `±S`.
pub fn make_additive(
    spec: &PreconditionerSpec,
    sys: &ArrowheadSystem,
    schur: &AdditiveSchur,
) -> Result<Preconditioner, PrecondError> {
    if !spec.family.is_additive() {
        return Err(PrecondError::WrongFamily {
            preset: format!("{:?}", spec.family),
            reason: "nested families need a block tridiagonal system".into(),
        });
    }
    let m = sys.leading_count();
    check_signs(spec, m + 1)?;
    let mut solvers: Vec<Option<Arc<dyn BlockSolver>>> = (0..m)
        .map(|i| Some(Arc::new(schur.leading_factor(i).clone()) as Arc<dyn BlockSolver>))
        .collect();
    solvers.push(Some(Arc::new(schur.factor().clone())));
    let couplings = (0..m)
        .map(|i| Arc::new(sys.border_row(i).clone()) as Arc<dyn BlockOperator>)
        .collect();
    make_with_solvers(spec, solvers, couplings)
}

/// `P⁻¹·A`, column by column.
pub fn preconditioned_matrix(
    p: &Preconditioner,
    a: &DenseMatrix,
) -> Result<DenseMatrix, PrecondError> {
    if a.rows() > MAX_EIGEN_DIM {
        return Err(PrecondError::TooLarge {
            dim: a.rows(),
            max: MAX_EIGEN_DIM,
        });
    }
    if a.rows() != p.dim() {
        return Err(PrecondError::DimensionMismatch {
            expected: p.dim(),
            found: a.rows(),
        });
    }
    let mut t = DenseMatrix::zeros(a.rows(), a.cols());
    for j in 0..a.cols() {
        t.set_column(j, &p.apply(&a.column(j))?);
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::block::{assemble, assemble_arrowhead, permute_threeblock, random_system, SystemOptions};
    use crate::dense::lu_factor;
    use crate::schur::{additive_schur, nested_chain, Preset};

    fn scalar(v: f64) -> DenseMatrix {
        DenseMatrix::from_diagonal(&[v])
    }

    fn scalar_system() -> BlockTridiagonalSystem {
        BlockTridiagonalSystem::new(vec![scalar(1.0); 3], vec![scalar(1.0); 2], vec![scalar(1.0); 2])
            .unwrap()
    }

    fn nested(preset: Preset, sys: &BlockTridiagonalSystem) -> Preconditioner {
        make_nested(&preset.spec(), sys, &nested_chain(sys).unwrap()).unwrap()
    }

    /// Dense nested preconditioner assembled directly from its definition.
    fn dense_nested(preset: Preset, sys: &BlockTridiagonalSystem) -> DenseMatrix {
        let spec = preset.spec();
        let chain = nested_chain(sys).unwrap();
        let off = sys.offsets();
        let mut p = DenseMatrix::zeros(off[sys.n()], off[sys.n()]);
        for i in 0..sys.n() {
            p.set_block(off[i], off[i], &chain.s(i).scale(spec.diag_signs[i]));
            if spec.family.is_triangular() && i + 1 < sys.n() {
                p.set_block(off[i + 1], off[i], &sys.lower(i).scale(spec.subdiag_signs[i]));
            }
        }
        p
    }

    fn max_diff(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
    }

    #[test]
    fn p1_scalar_forward_substitution() {
        let x = nested(Preset::P1, &scalar_system()).apply(&[1.0, 0.0, 0.0]).unwrap();
        // [[1],[1,-2],[0,1,1.5]] x = e1
        let oracle = [1.0, 0.5, -0.5 / 1.5];
        assert!(max_diff(&x, &oracle) < 1e-15);
    }

    #[test]
    fn one_block_diagonal_is_the_block_itself() {
        let a = DenseMatrix::from_rows(&[vec![2.0, 1.0], vec![0.0, 4.0]]).unwrap();
        let sys = BlockTridiagonalSystem::new(vec![a.clone()], vec![], vec![]).unwrap();
        let p = nested(Preset::Dn(1), &sys);
        let t = preconditioned_matrix(&p, &a).unwrap();
        assert!(t.sub(&DenseMatrix::identity(2)).unwrap().max_abs() < 1e-15);
    }

    #[test]
    fn qd1_with_zero_borders_is_block_diagonal() {
        let a1 = DenseMatrix::from_diagonal(&[2.0, 4.0]);
        let a2 = DenseMatrix::from_diagonal(&[5.0, 10.0]);
        let z = DenseMatrix::zeros(2, 2);
        let sys = BlockTridiagonalSystem::new(
            vec![a1, a2, DenseMatrix::identity(2)],
            vec![z.clone(); 2],
            vec![z; 2],
        )
        .unwrap();
        let arrow = permute_threeblock(&sys).unwrap().0;
        let p = make_additive(&Preset::QD1.spec(), &arrow, &additive_schur(&arrow).unwrap()).unwrap();
        let x = p.apply(&[2.0, 4.0, 1.0, 1.0, 5.0, 10.0]).unwrap();
        assert_eq!(x, vec![1.0; 6]);
    }

    #[test]
    fn identity_blocks_return_input() {
        let id: Vec<Arc<dyn BlockSolver>> = (0..3)
            .map(|_| Arc::new(lu_factor(&DenseMatrix::identity(2)).unwrap()) as Arc<dyn BlockSolver>)
            .collect();
        let p = Preconditioner::new(id, vec![1.0; 3], vec![]).unwrap();
        let v: Vec<f64> = (0..6).map(|i| i as f64 - 2.5).collect();
        assert_eq!(p.apply(&v).unwrap(), v);
    }

    #[test]
    fn pd3_scalar_chain() {
        let x = nested(Preset::PD3, &scalar_system()).apply(&[1.0, 1.0, 1.0]).unwrap();
        assert!(max_diff(&x, &[1.0, -0.5, 2.0 / 3.0]) < 1e-15);
    }

    #[test]
    fn apply_matches_dense_inverse_oracle() {
        let presets = [Preset::P1, Preset::P2, Preset::P3, Preset::P4, Preset::PD1, Preset::PD4];
        for seed in 0..10 {
            let sys = random_system(&SystemOptions::new(vec![4, 3, 5], seed)).unwrap();
            let v: Vec<f64> = (0..12).map(|i| ((i * 7 + seed as usize) % 5) as f64 - 2.0).collect();
            for preset in presets {
                let x = nested(preset, &sys).apply(&v).unwrap();
                let oracle = lu_factor(&dense_nested(preset, &sys)).unwrap().solve_vec(&v).unwrap();
                let scale = oracle.iter().fold(1.0f64, |m, y| m.max(y.abs()));
                assert!(max_diff(&x, &oracle) <= 1e-11 * scale, "{preset} seed {seed}");
            }
        }
        let x = nested(Preset::P1, &scalar_system()).apply(&[1.0, 2.0, 3.0]).unwrap();
        let oracle = lu_factor(&dense_nested(Preset::P1, &scalar_system()))
            .unwrap()
            .inverse()
            .mat_vec(&[1.0, 2.0, 3.0])
            .unwrap();
        assert!(max_diff(&x, &oracle) < 1e-13);
    }

    #[test]
    fn p1_preconditioned_structure() {
        let sys = random_system(&SystemOptions::new(vec![3, 4, 2], 5)).unwrap();
        let chain = nested_chain(&sys).unwrap();
        let t = preconditioned_matrix(&nested(Preset::P1, &sys), &assemble(&sys)).unwrap();
        let off = sys.offsets();
        let block = |bi: usize, bj: usize| {
            t.submatrix(off[bi], off[bj], off[bi + 1] - off[bi], off[bj + 1] - off[bj])
        };
        let scale = t.frobenius_norm();
        for (bi, bj) in [(1, 0), (2, 0), (2, 1)] {
            assert!(block(bi, bj).frobenius_norm() <= 1e-11 * scale);
        }
        for b in 0..3 {
            let d = block(b, b).sub(&DenseMatrix::identity(off[b + 1] - off[b])).unwrap();
            assert!(d.frobenius_norm() <= 1e-11 * scale);
        }
        let a1inv_b1 = lu_factor(sys.diag(0)).unwrap();
        let want12 = crate::dense::lu_solve(&a1inv_b1, sys.upper(0)).unwrap();
        assert!(block(0, 1).sub(&want12).unwrap().frobenius_norm() <= 1e-11 * scale);
        let want23 = crate::dense::lu_solve(chain.factor(1), sys.upper(1)).unwrap().scale(-1.0);
        assert!(block(1, 2).sub(&want23).unwrap().frobenius_norm() <= 1e-11 * scale);
    }

    #[test]
    fn full_lu_preconditioner_gives_identity() {
        let sys = random_system(&SystemOptions::new(vec![3, 3, 3], 8)).unwrap();
        let a = assemble(&sys);
        let p = Preconditioner::single(Arc::new(lu_factor(&a).unwrap()));
        let t = preconditioned_matrix(&p, &a).unwrap();
        assert!(t.sub(&DenseMatrix::identity(9)).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn q1_preconditioned_is_unit_upper_block_triangular() {
        let sys = random_system(&SystemOptions::new(vec![4, 3, 2], 12)).unwrap();
        let (arrow, _) = permute_threeblock(&sys).unwrap();
        let p = make_additive(&Preset::Q1.spec(), &arrow, &additive_schur(&arrow).unwrap()).unwrap();
        let t = preconditioned_matrix(&p, &assemble_arrowhead(&arrow)).unwrap();
        // leading part is 6x6 (A1, A3), corner 3x3
        let lead = 6;
        let lower = t.submatrix(lead, 0, 3, lead);
        assert!(lower.max_abs() < 1e-11);
        assert!(t.submatrix(0, 0, lead, lead).sub(&DenseMatrix::identity(lead)).unwrap().max_abs() < 1e-11);
        assert!(t.submatrix(lead, lead, 3, 3).sub(&DenseMatrix::identity(3)).unwrap().max_abs() < 1e-11);
    }

    #[test]
    fn missing_solver_is_reported() {
        let spec = Preset::PD1.spec();
        let s: Option<Arc<dyn BlockSolver>> =
            Some(Arc::new(lu_factor(&DenseMatrix::identity(1)).unwrap()));
        let err = make_with_solvers(&spec, vec![s.clone(), None, s], vec![]);
        assert!(matches!(err, Err(PrecondError::MissingSolver { block: 2 })));
    }

    #[test]
    fn families_must_match_the_system() {
        let sys = scalar_system();
        let chain = nested_chain(&sys).unwrap();
        assert!(matches!(
            make_nested(&Preset::Q1.spec(), &sys, &chain),
            Err(PrecondError::WrongFamily { .. })
        ));
        assert!(matches!(
            make_nested(&Preset::Pn(4).spec(), &sys, &chain),
            Err(PrecondError::SignLength { .. })
        ));
    }
}

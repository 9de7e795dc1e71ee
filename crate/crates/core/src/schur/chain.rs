use super::PrecondError;
use crate::block::{ArrowheadSystem, BlockTridiagonalSystem};
use crate::dense::{lu_factor, lu_solve, DenseError, DenseMatrix, LuFactors};

/// Nested Schur complements `S_1 = A_1`, `S_{i+1} = A_{i+1} + C_i S_i⁻¹ B_iᵀ`
/// with their LU factors.
#[derive(Clone, Debug)]
pub struct SchurChain {
    s: Vec<DenseMatrix>,
    factors: Vec<LuFactors>,
}

impl SchurChain {
    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    /// `S_{i+1}` for zero-based `i`.
    pub fn s(&self, i: usize) -> &DenseMatrix {
        &self.s[i]
    }

    pub fn factor(&self, i: usize) -> &LuFactors {
        &self.factors[i]
    }

    pub fn blocks(&self) -> &[DenseMatrix] {
        &self.s
    }
}

fn factor_or(a: &DenseMatrix, err: PrecondError) -> Result<LuFactors, PrecondError> {
    match lu_factor(a) {
        Ok(f) => Ok(f),
        Err(DenseError::Singular { .. }) => Err(err),
        Err(e) => Err(e.into()),
    }
}

pub fn nested_chain(sys: &BlockTridiagonalSystem) -> Result<SchurChain, PrecondError> {
    let n = sys.n();
    let mut s = Vec::with_capacity(n);
    let mut factors = Vec::with_capacity(n);
    let mut current = sys.diag(0).clone();
    for i in 0..n {
        let f = factor_or(&current, PrecondError::SingularSchur { block: i + 1 })?;
        if i + 1 < n {
            let x = lu_solve(&f, sys.upper(i))?;
            let next = sys.diag(i + 1).add(&sys.lower(i).mat_mul(&x)?)?;
            s.push(std::mem::replace(&mut current, next));
        } else {
            s.push(current.clone());
        }
        factors.push(f);
    }
    Ok(SchurChain { s, factors })
}

/// Schur complement of the corner of an arrowhead system, sign-normalized
/// so that for the permuted three-block form `S = A_2 + C A⁻¹ Bᵀ`.
#[derive(Clone, Debug)]
pub struct AdditiveSchur {
    s: DenseMatrix,
    factor: LuFactors,
    /// Factors of the signed leading blocks.
    leading_factors: Vec<LuFactors>,
}

impl AdditiveSchur {
    pub fn s(&self) -> &DenseMatrix {
        &self.s
    }

    pub fn factor(&self) -> &LuFactors {
        &self.factor
    }

    pub fn leading_factor(&self, i: usize) -> &LuFactors {
        &self.leading_factors[i]
    }
}

/// `S = Σ C_i (s_i A_i)⁻¹ B_iᵀ − s_c D` for leading signs `s_i` and corner
/// sign `s_c`; the corner Schur complement of the assembled matrix is `-S`.
pub fn additive_schur(sys: &ArrowheadSystem) -> Result<AdditiveSchur, PrecondError> {
    let mut s = sys.corner().scale(-sys.corner_sign());
    let mut leading_factors = Vec::with_capacity(sys.leading_count());
    for i in 0..sys.leading_count() {
        let signed = sys.leading(i).scale(sys.leading_sign(i));
        let f = factor_or(&signed, PrecondError::SingularLeadingBlock { block: i + 1 })?;
        let x = lu_solve(&f, sys.border_col(i))?;
        s = s.add(&sys.border_row(i).mat_mul(&x)?)?;
        leading_factors.push(f);
    }
    let factor = factor_or(&s, PrecondError::SingularSchur {
        block: sys.leading_count() + 1,
    })?;
    Ok(AdditiveSchur {
        s,
        factor,
        leading_factors,
    })
}

/// Block `L·D·U` factors of an assembled block tridiagonal matrix.
#[derive(Clone, Debug)]
pub struct BlockLdu {
    pub l: DenseMatrix,
    pub d: DenseMatrix,
    pub u: DenseMatrix,
}

impl BlockLdu {
    /// `‖L·D·U − A‖_F / ‖A‖_F`.
    pub fn reconstruction_error(&self, a: &DenseMatrix) -> Result<f64, PrecondError> {
        let ldu = self.l.mat_mul(&self.d)?.mat_mul(&self.u)?;
        Ok(ldu.sub(a)?.frobenius_norm() / a.frobenius_norm().max(f64::MIN_POSITIVE))
    }
}

/// `L` carries `(-1)^i C_i S_i⁻¹` below the diagonal, `D = diag((-1)^i S_i)`
/// and `U` carries `(-1)^i S_i⁻¹ B_iᵀ` above it (zero-based `i`).
pub fn block_ldu(sys: &BlockTridiagonalSystem, chain: &SchurChain) -> Result<BlockLdu, PrecondError> {
    let off = sys.offsets();
    let total = off[sys.n()];
    let mut l = DenseMatrix::identity(total);
    let mut d = DenseMatrix::zeros(total, total);
    let mut u = DenseMatrix::identity(total);
    for i in 0..sys.n() {
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        d.set_block(off[i], off[i], &chain.s(i).scale(sign));
        if i + 1 < sys.n() {
            let sinv = chain.factor(i).inverse();
            l.set_block(off[i + 1], off[i], &sys.lower(i).mat_mul(&sinv)?.scale(sign));
            u.set_block(off[i], off[i + 1], &lu_solve(chain.factor(i), sys.upper(i))?.scale(sign));
        }
    }
    Ok(BlockLdu { l, d, u })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::block::{assemble, permute_threeblock, random_system, SystemOptions};

    fn scalar(v: f64) -> DenseMatrix {
        DenseMatrix::from_diagonal(&[v])
    }

    fn scalar_system(a: [f64; 3]) -> BlockTridiagonalSystem {
        BlockTridiagonalSystem::new(
            a.iter().map(|&v| scalar(v)).collect(),
            vec![scalar(1.0); 2],
            vec![scalar(1.0); 2],
        )
        .unwrap()
    }

    fn rel(a: &DenseMatrix, b: &DenseMatrix) -> f64 {
        a.sub(b).unwrap().frobenius_norm() / b.frobenius_norm().max(1e-300)
    }

    /// Explicit inverse by cofactors for tiny matrices, independent of LU.
    fn cofactor_inverse(a: &DenseMatrix) -> DenseMatrix {
        fn det(m: &DenseMatrix) -> f64 {
            let n = m.rows();
            if n == 1 {
                return m[(0, 0)];
            }
            (0..n)
                .map(|j| {
                    let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                    sign * m[(0, j)] * det(&minor(m, 0, j))
                })
                .sum()
        }
        fn minor(m: &DenseMatrix, r: usize, c: usize) -> DenseMatrix {
            let n = m.rows();
            let rows: Vec<Vec<f64>> = (0..n)
                .filter(|&i| i != r)
                .map(|i| (0..n).filter(|&j| j != c).map(|j| m[(i, j)]).collect())
                .collect();
            DenseMatrix::from_rows(&rows).unwrap()
        }
        let n = a.rows();
        let d = det(a);
        let mut inv = DenseMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
                let cof = if n == 1 { 1.0 } else { det(&minor(a, j, i)) };
                inv[(i, j)] = sign * cof / d;
            }
        }
        inv
    }

    #[test]
    fn scalar_recursion() {
        let chain = nested_chain(&scalar_system([1.0, 1.0, 1.0])).unwrap();
        let s: Vec<f64> = chain.blocks().iter().map(|m| m[(0, 0)]).collect();
        assert_eq!(s, vec![1.0, 2.0, 1.5]);
    }

    #[test]
    fn zero_tail_identity_chain() {
        let i2 = DenseMatrix::identity(2);
        let z = DenseMatrix::zeros(2, 2);
        let sys = BlockTridiagonalSystem::new(
            vec![i2.clone(), z.clone(), z],
            vec![i2.clone(); 2],
            vec![i2.clone(); 2],
        )
        .unwrap();
        let chain = nested_chain(&sys).unwrap();
        assert_eq!(*chain.s(1), i2);
        assert_eq!(*chain.s(2), i2);
    }

    #[test]
    fn second_schur_matches_explicit_inverse() {
        for seed in 0..5 {
            let sys = random_system(&SystemOptions::new(vec![3, 2, 2], seed)).unwrap();
            let chain = nested_chain(&sys).unwrap();
            let oracle = sys.diag(1).add(
                &sys.lower(0)
                    .mat_mul(&cofactor_inverse(sys.diag(0)))
                    .unwrap()
                    .mat_mul(sys.upper(0))
                    .unwrap(),
            )
            .unwrap();
            assert!(rel(chain.s(1), &oracle) < 1e-12);
        }
    }

    #[test]
    fn singular_chain_names_the_block() {
        // S2 = A2 + C1 A1^{-1} B1^T = -1 + 1 = 0
        let sys = scalar_system([1.0, -1.0, 1.0]);
        assert!(matches!(
            nested_chain(&sys),
            Err(PrecondError::SingularSchur { block: 2 })
        ));
    }

    #[test]
    fn additive_scalar_cases() {
        let sys = permute_threeblock(&scalar_system([1.0, 0.0, 1.0])).unwrap().0;
        assert_eq!(additive_schur(&sys).unwrap().s()[(0, 0)], 2.0);

        let i2 = DenseMatrix::identity(2);
        let z = DenseMatrix::zeros(2, 2);
        let sys = BlockTridiagonalSystem::new(
            vec![i2.clone(), i2.clone(), i2.clone()],
            vec![z.clone(); 2],
            vec![z; 2],
        )
        .unwrap();
        let arrow = permute_threeblock(&sys).unwrap().0;
        assert_eq!(*additive_schur(&arrow).unwrap().s(), i2);
    }

    #[test]
    fn additive_matches_dense_oracle() {
        for seed in 0..5 {
            let sys = random_system(&SystemOptions::new(vec![3, 2, 4], seed)).unwrap();
            let arrow = permute_threeblock(&sys).unwrap().0;
            // assemble A = diag(A1, A3), C = [C1, B2ᵀ], Bᵀ = [B1ᵀ; C2] densely
            let (s1, s3, s2) = (3, 4, 2);
            let mut a = DenseMatrix::zeros(s1 + s3, s1 + s3);
            a.set_block(0, 0, sys.diag(0));
            a.set_block(s1, s1, sys.diag(2));
            let mut c = DenseMatrix::zeros(s2, s1 + s3);
            c.set_block(0, 0, sys.lower(0));
            c.set_block(0, s1, sys.upper(1));
            let mut bt = DenseMatrix::zeros(s1 + s3, s2);
            bt.set_block(0, 0, sys.upper(0));
            bt.set_block(s1, 0, sys.lower(1));
            let ainv = lu_factor(&a).unwrap().inverse();
            let oracle = sys
                .diag(1)
                .add(&c.mat_mul(&ainv).unwrap().mat_mul(&bt).unwrap())
                .unwrap();
            assert!(rel(additive_schur(&arrow).unwrap().s(), &oracle) < 1e-12);
        }
    }

    #[test]
    fn ldu_reconstructs_the_system() {
        for n in 2..=8 {
            let sizes: Vec<usize> = (0..n).map(|i| 2 + (i * 3) % 4).collect();
            let sys = random_system(&SystemOptions::new(sizes, n as u64)).unwrap();
            let chain = nested_chain(&sys).unwrap();
            let f = block_ldu(&sys, &chain).unwrap();
            let prod = f.l.mat_mul(&f.d).unwrap().mat_mul(&f.u).unwrap();
            assert!(rel(&prod, &assemble(&sys)) < 1e-11, "n = {n}");
        }
    }
}

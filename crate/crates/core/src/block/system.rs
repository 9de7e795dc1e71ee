use super::BlockError;
use crate::dense::DenseMatrix;

/// `(-1)^i` for a zero-based block index.
#[inline]
pub(crate) fn alt_sign(i: usize) -> f64 {
    if i % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Block tridiagonal system with diagonal `(-1)^i A_i` (zero-based), `B_iᵀ`
/// above and `C_i` below the diagonal.
///
/// Diagonal blocks are stored unsigned. `upper[i]` holds `B_iᵀ` directly.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockTridiagonalSystem {
    diag: Vec<DenseMatrix>,
    upper: Vec<DenseMatrix>,
    lower: Vec<DenseMatrix>,
}

impl BlockTridiagonalSystem {
    pub fn new(
        diag: Vec<DenseMatrix>,
        upper: Vec<DenseMatrix>,
        lower: Vec<DenseMatrix>,
    ) -> Result<Self, BlockError> {
        let n = diag.len();
        if n == 0 {
            return Err(BlockError::WrongBlockCount {
                expected: 1,
                found: 0,
            });
        }
        if upper.len() + 1 != n || lower.len() + 1 != n {
            return Err(BlockError::ShapeMismatch(format!(
                "{n} diagonal blocks need {} off-diagonal blocks on each side, got {} and {}",
                n - 1,
                upper.len(),
                lower.len()
            )));
        }
        for (i, a) in diag.iter().enumerate() {
            if !a.is_square() {
                return Err(BlockError::ShapeMismatch(format!(
                    "A_{} is {:?}, not square",
                    i + 1,
                    a.shape()
                )));
            }
        }
        for i in 0..n - 1 {
            let (si, sj) = (diag[i].rows(), diag[i + 1].rows());
            if upper[i].shape() != (si, sj) {
                return Err(BlockError::ShapeMismatch(format!(
                    "B_{}ᵀ is {:?}, expected {:?}",
                    i + 1,
                    upper[i].shape(),
                    (si, sj)
                )));
            }
            if lower[i].shape() != (sj, si) {
                return Err(BlockError::ShapeMismatch(format!(
                    "C_{} is {:?}, expected {:?}",
                    i + 1,
                    lower[i].shape(),
                    (sj, si)
                )));
            }
        }
        Ok(Self { diag, upper, lower })
    }

    pub fn n(&self) -> usize {
        self.diag.len()
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        self.diag.iter().map(DenseMatrix::rows).collect()
    }

    /// Block start offsets, with the total size appended.
    pub fn offsets(&self) -> Vec<usize> {
        offsets(&self.block_sizes())
    }

    pub fn total_size(&self) -> usize {
        self.block_sizes().iter().sum()
    }

    /// Unsigned diagonal block `A_{i+1}`.
    pub fn diag(&self, i: usize) -> &DenseMatrix {
        &self.diag[i]
    }

    /// `B_{i+1}ᵀ`, coupling block `i` to block `i+1`.
    pub fn upper(&self, i: usize) -> &DenseMatrix {
        &self.upper[i]
    }

    /// `C_{i+1}`, coupling block `i+1` to block `i`.
    pub fn lower(&self, i: usize) -> &DenseMatrix {
        &self.lower[i]
    }

    pub fn diag_blocks(&self) -> &[DenseMatrix] {
        &self.diag
    }

    pub fn upper_blocks(&self) -> &[DenseMatrix] {
        &self.upper
    }

    pub fn lower_blocks(&self) -> &[DenseMatrix] {
        &self.lower
    }

    /// Replaces diagonal block `i`, keeping its shape.
    pub fn with_diag(mut self, i: usize, a: DenseMatrix) -> Result<Self, BlockError> {
        if a.shape() != self.diag[i].shape() {
            return Err(BlockError::ShapeMismatch(format!(
                "replacement A_{} is {:?}, expected {:?}",
                i + 1,
                a.shape(),
                self.diag[i].shape()
            )));
        }
        self.diag[i] = a;
        Ok(self)
    }
}

pub(crate) fn offsets(sizes: &[usize]) -> Vec<usize> {
    let mut off = Vec::with_capacity(sizes.len() + 1);
    off.push(0);
    for s in sizes {
        off.push(off.last().unwrap() + s);
    }
    off
}

/// Monolithic matrix of a block tridiagonal system.
pub fn assemble(sys: &BlockTridiagonalSystem) -> DenseMatrix {
    let off = sys.offsets();
    let mut m = DenseMatrix::zeros(off[sys.n()], off[sys.n()]);
    for i in 0..sys.n() {
        m.set_block(off[i], off[i], &sys.diag[i].scale(alt_sign(i)));
        if i + 1 < sys.n() {
            m.set_block(off[i], off[i + 1], &sys.upper[i]);
            m.set_block(off[i + 1], off[i], &sys.lower[i]);
        }
    }
    m
}

/// Arrowhead system: block diagonal leading part, dense last block row and
/// column.
///
/// Leading blocks and the corner are kept unsigned together with their
/// display signs, so both the permuted three-block form and the n-tuple
/// domain decomposition form fit.
#[derive(Clone, Debug, PartialEq)]
pub struct ArrowheadSystem {
    leading: Vec<DenseMatrix>,
    leading_signs: Vec<f64>,
    /// `C_i`: corner rows × leading block `i` columns.
    border_rows: Vec<DenseMatrix>,
    /// `B_iᵀ`: leading block `i` rows × corner columns.
    border_cols: Vec<DenseMatrix>,
    corner: DenseMatrix,
    corner_sign: f64,
}

impl ArrowheadSystem {
    pub fn new(
        leading: Vec<DenseMatrix>,
        leading_signs: Vec<f64>,
        border_rows: Vec<DenseMatrix>,
        border_cols: Vec<DenseMatrix>,
        corner: DenseMatrix,
        corner_sign: f64,
    ) -> Result<Self, BlockError> {
        let m = leading.len();
        if leading_signs.len() != m || border_rows.len() != m || border_cols.len() != m {
            return Err(BlockError::ShapeMismatch(format!(
                "{m} leading blocks but {} signs, {} border rows, {} border columns",
                leading_signs.len(),
                border_rows.len(),
                border_cols.len()
            )));
        }
        if !corner.is_square() {
            return Err(BlockError::ShapeMismatch("corner block is not square".into()));
        }
        let k = corner.rows();
        for i in 0..m {
            let s = leading[i].rows();
            if !leading[i].is_square()
                || border_rows[i].shape() != (k, s)
                || border_cols[i].shape() != (s, k)
            {
                return Err(BlockError::ShapeMismatch(format!(
                    "leading block {} {:?} does not fit borders {:?} / {:?} with corner size {k}",
                    i + 1,
                    leading[i].shape(),
                    border_rows[i].shape(),
                    border_cols[i].shape()
                )));
            }
        }
        Ok(Self {
            leading,
            leading_signs,
            border_rows,
            border_cols,
            corner,
            corner_sign,
        })
    }

    /// n-tuple domain decomposition form: leading signs `(-1)^i`, corner sign
    /// `(-1)^m` for `m` leading blocks.
    pub fn domain_decomposition(
        leading: Vec<DenseMatrix>,
        border_rows: Vec<DenseMatrix>,
        border_cols: Vec<DenseMatrix>,
        corner: DenseMatrix,
    ) -> Result<Self, BlockError> {
        let m = leading.len();
        let signs = (0..m).map(alt_sign).collect();
        Self::new(leading, signs, border_rows, border_cols, corner, alt_sign(m))
    }

    pub fn leading_count(&self) -> usize {
        self.leading.len()
    }

    pub fn leading(&self, i: usize) -> &DenseMatrix {
        &self.leading[i]
    }

    pub fn leading_sign(&self, i: usize) -> f64 {
        self.leading_signs[i]
    }

    pub fn border_row(&self, i: usize) -> &DenseMatrix {
        &self.border_rows[i]
    }

    pub fn border_col(&self, i: usize) -> &DenseMatrix {
        &self.border_cols[i]
    }

    pub fn corner(&self) -> &DenseMatrix {
        &self.corner
    }

    pub fn corner_sign(&self) -> f64 {
        self.corner_sign
    }

    /// Leading block sizes followed by the corner size.
    pub fn block_sizes(&self) -> Vec<usize> {
        let mut s: Vec<usize> = self.leading.iter().map(DenseMatrix::rows).collect();
        s.push(self.corner.rows());
        s
    }

    pub fn total_size(&self) -> usize {
        self.block_sizes().iter().sum()
    }
}

pub fn assemble_arrowhead(sys: &ArrowheadSystem) -> DenseMatrix {
    let off = offsets(&sys.block_sizes());
    let m = sys.leading_count();
    let mut out = DenseMatrix::zeros(off[m + 1], off[m + 1]);
    for i in 0..m {
        out.set_block(off[i], off[i], &sys.leading[i].scale(sys.leading_signs[i]));
        out.set_block(off[i], off[m], &sys.border_cols[i]);
        out.set_block(off[m], off[i], &sys.border_rows[i]);
    }
    out.set_block(off[m], off[m], &sys.corner.scale(sys.corner_sign));
    out
}

/// Reorders a three-block tridiagonal system into arrowhead form (block
/// order 1, 3, 2).
///
/// The returned permutation `p` satisfies `arrow[i][j] = tri[p[i]][p[j]]`
/// on the assembled matrices.
pub fn permute_threeblock(
    sys: &BlockTridiagonalSystem,
) -> Result<(ArrowheadSystem, Vec<usize>), BlockError> {
    if sys.n() != 3 {
        return Err(BlockError::WrongBlockCount {
            expected: 3,
            found: sys.n(),
        });
    }
    let arrow = ArrowheadSystem::new(
        vec![sys.diag[0].clone(), sys.diag[2].clone()],
        vec![1.0, 1.0],
        vec![sys.lower[0].clone(), sys.upper[1].clone()],
        vec![sys.upper[0].clone(), sys.lower[1].clone()],
        sys.diag[1].clone(),
        -1.0,
    )?;
    let off = sys.offsets();
    let perm = (off[0]..off[1])
        .chain(off[2]..off[3])
        .chain(off[1]..off[2])
        .collect();
    Ok((arrow, perm))
}

/// Symmetric permutation `out[i][j] = a[p[i]][p[j]]`.
pub fn permute_dense(a: &DenseMatrix, p: &[usize]) -> DenseMatrix {
    let n = p.len();
    let mut out = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            out[(i, j)] = a[(p[i], p[j])];
        }
    }
    out
}
